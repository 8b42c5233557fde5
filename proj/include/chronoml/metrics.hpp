#pragma once

#include <string>
#include <vector>

#include "chronoml/series.hpp"

namespace chronoml {

enum class LossKind { MASE, SMAPE, RMSE };

LossKind loss_kind_from_string(const std::string &name);
std::string to_string(LossKind kind);

// mean(|actual - forecast|) / mean_{t=m+1..T} |insample_t - insample_{t-m}|.
// Throws UndefinedScaleError when the seasonal-naive in-sample error is zero.
double mase(const std::vector<double> &actual, const std::vector<double> &forecast,
            const std::vector<double> &insample, int m);

// Mean of 2|y - yhat| / (|y| + |yhat|); a 0/0 step contributes 0.
double smape(const std::vector<double> &actual, const std::vector<double> &forecast);

double rmse(const std::vector<double> &actual, const std::vector<double> &forecast);

// Forecasts indexed [series][step][dim]. Per-series losses are averaged over
// target dimensions, then unweighted over series. Series with an undefined
// MASE scale are skipped; if every series is skipped an error is raised.
// `insample` provides the per-series training targets used for MASE scaling.
double panel_loss(LossKind kind, const PanelDataset &actuals,
                  const std::vector<std::vector<std::vector<double>>> &forecasts,
                  const PanelDataset &insample, int m);

}  // namespace chronoml
