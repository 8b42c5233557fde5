#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chronoml/series.hpp"

namespace chronoml {

enum class TransformKind { Imputer, Scaler, Detrender, Deseasonalizer, OrdinalEncoder };

struct TransformSpec {
    TransformKind kind;
    std::string strategy;  // imputer: forward_fill|mean|zero; scaler: standard|minmax|none
    int degree = 1;        // detrender: 0 (constant) or 1 (linear)
    int period = 1;        // deseasonalizer season length
};

// A fitted preprocessing step. Statistics come from the training panel only;
// invertible steps (scaler, detrender, deseasonalizer) retain per-series state
// so forecasts can be mapped back to the original scale.
class FittedTransform {
public:
    // Fits on `panel` and transforms it in place.
    static FittedTransform fit_transform(const TransformSpec &spec, PanelDataset &panel);

    // Maps forecasts (H rows x d) for series `i` back to the input scale.
    // Forecast steps are T_i, T_i+1, ... of the original series.
    void inverse_forecasts(std::size_t i, std::vector<std::vector<double>> &forecasts) const;

    const TransformSpec &spec() const { return spec_; }

    nlohmann::json save() const;
    static FittedTransform load(const nlohmann::json &j);

private:
    TransformSpec spec_;
    // scaler: per series per dim {offset, scale}; detrender: {intercept, slope};
    // deseasonalizer: per series per dim season profile.
    std::vector<std::vector<std::vector<double>>> state_;
    std::vector<std::size_t> train_lengths_;
    // encoder: per categorical column, sorted train labels (code = position,
    // unseen labels map to labels.size()).
    std::vector<std::vector<std::string>> labels_;

    void fit_imputer(PanelDataset &panel);
    void fit_scaler(PanelDataset &panel);
    void fit_detrender(PanelDataset &panel);
    void fit_deseasonalizer(PanelDataset &panel);
    void fit_encoder(PanelDataset &panel);
};

struct Design {
    std::vector<std::vector<double>> X;
    std::vector<std::vector<double>> Y;
};

// Lagged tabular reduction: row t holds [y_{t-w} .. y_{t-1}] (flattened over
// target dimensions) plus the values of `feature_cols` at time t; the target
// is y_t. Produces T_i - w rows. feature_cols index numeric (or encoded)
// columns of series.past.
Design window_reduce(const TimeSeriesRecord &series, int w,
                     const std::vector<std::size_t> &feature_cols = {});

}  // namespace chronoml
