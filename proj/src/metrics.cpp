#include "chronoml/metrics.hpp"

#include <cmath>

#include "chronoml/errors.hpp"

namespace chronoml {
namespace {

void check_pair(const std::vector<double> &actual, const std::vector<double> &forecast) {
    if (actual.empty()) throw Error("metric requires at least one observation");
    if (actual.size() != forecast.size()) {
        throw Error("actual/forecast length mismatch: " + std::to_string(actual.size()) + " vs " +
                    std::to_string(forecast.size()));
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (is_missing(actual[i]) || is_missing(forecast[i])) {
            throw Error("missing marker in metric input");
        }
    }
}

std::vector<double> column(const std::vector<std::vector<double>> &rows, std::size_t k) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &r : rows) out.push_back(r[k]);
    return out;
}

}  // namespace

LossKind loss_kind_from_string(const std::string &name) {
    if (name == "mase") return LossKind::MASE;
    if (name == "smape") return LossKind::SMAPE;
    if (name == "rmse") return LossKind::RMSE;
    throw ConfigError("unknown metric '" + name + "' (expected mase, smape, or rmse)");
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::MASE: return "mase";
        case LossKind::SMAPE: return "smape";
        case LossKind::RMSE: return "rmse";
    }
    return "?";
}

double mase(const std::vector<double> &actual, const std::vector<double> &forecast,
            const std::vector<double> &insample, int m) {
    check_pair(actual, forecast);
    if (m < 1) throw Error("mase requires seasonal period m >= 1");
    if (insample.size() <= static_cast<std::size_t>(m)) {
        throw UndefinedScaleError("mase requires insample length > m");
    }
    for (double v : insample) {
        if (is_missing(v)) throw Error("missing marker in mase insample");
    }
    double num = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) num += std::abs(actual[i] - forecast[i]);
    num /= static_cast<double>(actual.size());

    double denom = 0.0;
    const std::size_t mm = static_cast<std::size_t>(m);
    for (std::size_t t = mm; t < insample.size(); ++t) {
        denom += std::abs(insample[t] - insample[t - mm]);
    }
    denom /= static_cast<double>(insample.size() - mm);
    if (denom == 0.0) {
        throw UndefinedScaleError("seasonal-naive in-sample error is zero; MASE scale undefined");
    }
    return num / denom;
}

double smape(const std::vector<double> &actual, const std::vector<double> &forecast) {
    check_pair(actual, forecast);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = std::abs(actual[i]) + std::abs(forecast[i]);
        if (denom > 0.0) sum += 2.0 * std::abs(actual[i] - forecast[i]) / denom;
    }
    return sum / static_cast<double>(actual.size());
}

double rmse(const std::vector<double> &actual, const std::vector<double> &forecast) {
    check_pair(actual, forecast);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - forecast[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

double panel_loss(LossKind kind, const PanelDataset &actuals,
                  const std::vector<std::vector<std::vector<double>>> &forecasts,
                  const PanelDataset &insample, int m) {
    if (forecasts.size() != actuals.series.size()) {
        throw Error("panel_loss: one forecast per series required");
    }
    double total = 0.0;
    std::size_t counted = 0;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < actuals.series.size(); ++i) {
        const auto &act_rows = actuals.series[i].targets;
        const auto &fc_rows = forecasts[i];
        if (fc_rows.size() != act_rows.size()) {
            throw Error("panel_loss: forecast length mismatch for series '" +
                        actuals.series[i].id + "'");
        }
        const std::size_t d = actuals.series[i].target_dim();
        double series_loss = 0.0;
        bool series_skipped = false;
        for (std::size_t k = 0; k < d; ++k) {
            auto act = column(act_rows, k);
            std::vector<double> fc;
            fc.reserve(fc_rows.size());
            for (const auto &r : fc_rows) {
                if (r.size() != d) throw Error("panel_loss: forecast dimension mismatch");
                fc.push_back(r[k]);
            }
            switch (kind) {
                case LossKind::MASE: {
                    try {
                        series_loss += mase(act, fc, column(insample.series[i].targets, k), m);
                    } catch (const UndefinedScaleError &) {
                        series_skipped = true;
                    }
                    break;
                }
                case LossKind::SMAPE:
                    series_loss += smape(act, fc);
                    break;
                case LossKind::RMSE:
                    series_loss += rmse(act, fc);
                    break;
            }
            if (series_skipped) break;
        }
        if (series_skipped) {
            ++skipped;
        } else {
            total += series_loss / static_cast<double>(d);
            ++counted;
        }
    }
    if (counted == 0) {
        throw UndefinedScaleError("panel_loss: MASE scale undefined for all " +
                                  std::to_string(skipped) + " series");
    }
    return total / static_cast<double>(counted);
}

}  // namespace chronoml
