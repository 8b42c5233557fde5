#include "chronoml/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "chronoml/errors.hpp"

namespace chronoml {
namespace {

void impute_column(std::vector<double> &v, const std::string &strategy, const std::string &what) {
    bool any_missing = false;
    bool all_missing = true;
    for (double x : v) {
        any_missing = any_missing || is_missing(x);
        all_missing = all_missing && is_missing(x);
    }
    if (!any_missing) return;
    if (strategy == "zero") {
        for (double &x : v) {
            if (is_missing(x)) x = 0.0;
        }
        return;
    }
    if (all_missing) {
        throw Error("imputer(" + strategy + "): all values missing in " + what);
    }
    if (strategy == "forward_fill") {
        // Leading missings are backfilled from the first observed value.
        double last = missing_value();
        for (double x : v) {
            if (!is_missing(x)) {
                last = x;
                break;
            }
        }
        for (double &x : v) {
            if (is_missing(x)) {
                x = last;
            } else {
                last = x;
            }
        }
    } else if (strategy == "mean") {
        double mean = 0.0;
        std::size_t n = 0;
        for (double x : v) {
            if (!is_missing(x)) {
                mean += x;
                ++n;
            }
        }
        mean /= static_cast<double>(n);
        for (double &x : v) {
            if (is_missing(x)) x = mean;
        }
    } else {
        throw ConfigError("unknown imputer strategy '" + strategy + "'");
    }
}

std::vector<double> target_column(const TimeSeriesRecord &s, std::size_t k) {
    std::vector<double> v;
    v.reserve(s.length());
    for (const auto &row : s.targets) v.push_back(row[k]);
    return v;
}

}  // namespace

FittedTransform FittedTransform::fit_transform(const TransformSpec &spec, PanelDataset &panel) {
    FittedTransform t;
    t.spec_ = spec;
    switch (spec.kind) {
        case TransformKind::Imputer: t.fit_imputer(panel); break;
        case TransformKind::Scaler: t.fit_scaler(panel); break;
        case TransformKind::Detrender: t.fit_detrender(panel); break;
        case TransformKind::Deseasonalizer: t.fit_deseasonalizer(panel); break;
        case TransformKind::OrdinalEncoder: t.fit_encoder(panel); break;
    }
    return t;
}

void FittedTransform::fit_imputer(PanelDataset &panel) {
    for (auto &s : panel.series) {
        const std::size_t d = s.target_dim();
        for (std::size_t k = 0; k < d; ++k) {
            auto col = target_column(s, k);
            impute_column(col, spec_.strategy, "targets of series '" + s.id + "'");
            for (std::size_t t = 0; t < col.size(); ++t) s.targets[t][k] = col[t];
        }
        for (std::size_t f = 0; f < s.past.size(); ++f) {
            if (!s.past[f].num.empty()) {
                impute_column(s.past[f].num, spec_.strategy,
                              "feature column of series '" + s.id + "'");
            }
            if (!s.future[f].num.empty()) {
                impute_column(s.future[f].num, spec_.strategy,
                              "future feature column of series '" + s.id + "'");
            }
        }
    }
}

void FittedTransform::fit_scaler(PanelDataset &panel) {
    if (spec_.strategy == "none") return;
    for (auto &s : panel.series) {
        const std::size_t d = s.target_dim();
        std::vector<std::vector<double>> series_state;
        for (std::size_t k = 0; k < d; ++k) {
            auto col = target_column(s, k);
            double offset = 0.0;
            double scale = 1.0;
            if (spec_.strategy == "standard") {
                double mean = 0.0;
                for (double x : col) mean += x;
                mean /= static_cast<double>(col.size());
                double var = 0.0;
                for (double x : col) var += (x - mean) * (x - mean);
                var /= static_cast<double>(col.size());  // population convention
                offset = mean;
                scale = var > 0.0 ? std::sqrt(var) : 1.0;
            } else if (spec_.strategy == "minmax") {
                const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
                offset = *lo;
                scale = (*hi > *lo) ? (*hi - *lo) : 1.0;
            } else {
                throw ConfigError("unknown scaler strategy '" + spec_.strategy + "'");
            }
            for (std::size_t t = 0; t < col.size(); ++t) {
                s.targets[t][k] = (col[t] - offset) / scale;
            }
            series_state.push_back({offset, scale});
        }
        state_.push_back(std::move(series_state));
    }
}

void FittedTransform::fit_detrender(PanelDataset &panel) {
    for (auto &s : panel.series) {
        const std::size_t d = s.target_dim();
        const double n = static_cast<double>(s.length());
        std::vector<std::vector<double>> series_state;
        for (std::size_t k = 0; k < d; ++k) {
            auto col = target_column(s, k);
            double a = 0.0;
            double b = 0.0;
            if (spec_.degree == 0) {
                for (double x : col) a += x;
                a /= n;
            } else {
                // OLS of y on t = 0..T-1
                double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
                for (std::size_t t = 0; t < col.size(); ++t) {
                    const double td = static_cast<double>(t);
                    st += td;
                    sy += col[t];
                    stt += td * td;
                    sty += td * col[t];
                }
                const double denom = n * stt - st * st;
                if (denom != 0.0) {
                    b = (n * sty - st * sy) / denom;
                    a = (sy - b * st) / n;
                } else {
                    a = sy / n;
                }
            }
            for (std::size_t t = 0; t < col.size(); ++t) {
                s.targets[t][k] = col[t] - (a + b * static_cast<double>(t));
            }
            series_state.push_back({a, b});
        }
        state_.push_back(std::move(series_state));
        train_lengths_.push_back(s.length());
    }
}

void FittedTransform::fit_deseasonalizer(PanelDataset &panel) {
    const std::size_t m = static_cast<std::size_t>(std::max(1, spec_.period));
    for (auto &s : panel.series) {
        const std::size_t d = s.target_dim();
        std::vector<std::vector<double>> series_state;
        for (std::size_t k = 0; k < d; ++k) {
            auto col = target_column(s, k);
            double overall = 0.0;
            for (double x : col) overall += x;
            overall /= static_cast<double>(col.size());
            std::vector<double> sums(m, 0.0);
            std::vector<std::size_t> counts(m, 0);
            for (std::size_t t = 0; t < col.size(); ++t) {
                sums[t % m] += col[t];
                ++counts[t % m];
            }
            std::vector<double> season(m, 0.0);
            for (std::size_t p = 0; p < m; ++p) {
                season[p] = counts[p] > 0 ? sums[p] / static_cast<double>(counts[p]) - overall : 0.0;
            }
            for (std::size_t t = 0; t < col.size(); ++t) {
                s.targets[t][k] = col[t] - season[t % m];
            }
            series_state.push_back(std::move(season));
        }
        state_.push_back(std::move(series_state));
        train_lengths_.push_back(s.length());
    }
}

void FittedTransform::fit_encoder(PanelDataset &panel) {
    labels_.resize(panel.schema.size());
    for (std::size_t f = 0; f < panel.schema.size(); ++f) {
        if (!panel.schema.categorical[f]) continue;
        std::set<std::string> seen;
        for (const auto &s : panel.series) {
            for (const auto &label : s.past[f].cat) seen.insert(label);
        }
        labels_[f].assign(seen.begin(), seen.end());
        const auto code_of = [&](const std::string &label) {
            const auto &ls = labels_[f];
            const auto it = std::lower_bound(ls.begin(), ls.end(), label);
            if (it != ls.end() && *it == label) {
                return static_cast<double>(it - ls.begin());
            }
            return static_cast<double>(ls.size());  // reserved unknown code
        };
        for (auto &s : panel.series) {
            s.past[f].num.clear();
            for (const auto &label : s.past[f].cat) s.past[f].num.push_back(code_of(label));
            s.future[f].num.clear();
            for (const auto &label : s.future[f].cat) s.future[f].num.push_back(code_of(label));
        }
    }
}

void FittedTransform::inverse_forecasts(std::size_t i,
                                        std::vector<std::vector<double>> &forecasts) const {
    switch (spec_.kind) {
        case TransformKind::Imputer:
        case TransformKind::OrdinalEncoder:
            return;
        case TransformKind::Scaler: {
            if (spec_.strategy == "none") return;
            const auto &st = state_.at(i);
            for (auto &row : forecasts) {
                for (std::size_t k = 0; k < row.size(); ++k) {
                    row[k] = row[k] * st[k][1] + st[k][0];
                }
            }
            return;
        }
        case TransformKind::Detrender: {
            const auto &st = state_.at(i);
            const double T = static_cast<double>(train_lengths_.at(i));
            for (std::size_t h = 0; h < forecasts.size(); ++h) {
                for (std::size_t k = 0; k < forecasts[h].size(); ++k) {
                    forecasts[h][k] += st[k][0] + st[k][1] * (T + static_cast<double>(h));
                }
            }
            return;
        }
        case TransformKind::Deseasonalizer: {
            const auto &st = state_.at(i);
            const std::size_t T = train_lengths_.at(i);
            for (std::size_t h = 0; h < forecasts.size(); ++h) {
                for (std::size_t k = 0; k < forecasts[h].size(); ++k) {
                    const auto &season = st[k];
                    forecasts[h][k] += season[(T + h) % season.size()];
                }
            }
            return;
        }
    }
}

nlohmann::json FittedTransform::save() const {
    nlohmann::json j;
    j["kind"] = static_cast<int>(spec_.kind);
    j["strategy"] = spec_.strategy;
    j["degree"] = spec_.degree;
    j["period"] = spec_.period;
    j["state"] = state_;
    j["train_lengths"] = train_lengths_;
    j["labels"] = labels_;
    return j;
}

FittedTransform FittedTransform::load(const nlohmann::json &j) {
    FittedTransform t;
    t.spec_.kind = static_cast<TransformKind>(j.at("kind").get<int>());
    t.spec_.strategy = j.at("strategy").get<std::string>();
    t.spec_.degree = j.at("degree").get<int>();
    t.spec_.period = j.at("period").get<int>();
    t.state_ = j.at("state").get<std::vector<std::vector<std::vector<double>>>>();
    t.train_lengths_ = j.at("train_lengths").get<std::vector<std::size_t>>();
    t.labels_ = j.at("labels").get<std::vector<std::vector<std::string>>>();
    return t;
}

Design window_reduce(const TimeSeriesRecord &series, int w,
                     const std::vector<std::size_t> &feature_cols) {
    if (w < 1) throw ConfigError("window length must be >= 1");
    const std::size_t T = series.length();
    if (T <= static_cast<std::size_t>(w)) {
        throw InsufficientLengthError("series '" + series.id + "' has length " +
                                      std::to_string(T) + " <= window " + std::to_string(w));
    }
    const std::size_t d = series.target_dim();
    Design design;
    const std::size_t ww = static_cast<std::size_t>(w);
    for (std::size_t t = ww; t < T; ++t) {
        std::vector<double> x;
        x.reserve(ww * d + feature_cols.size());
        for (std::size_t lag = t - ww; lag < t; ++lag) {
            for (std::size_t k = 0; k < d; ++k) x.push_back(series.targets[lag][k]);
        }
        for (std::size_t f : feature_cols) x.push_back(series.past[f].num[t]);
        design.X.push_back(std::move(x));
        design.Y.push_back(series.targets[t]);
    }
    return design;
}

}  // namespace chronoml
