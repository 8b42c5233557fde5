#include "chronoml/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronoml/mlp.hpp"
#include "chronoml/nelder_mead.hpp"
#include "chronoml/transforms.hpp"
#include "chronoml/tree.hpp"

namespace chronoml {
namespace {

std::vector<double> dim_column(const TimeSeriesRecord &s, std::size_t k) {
    std::vector<double> v;
    v.reserve(s.length());
    for (const auto &row : s.targets) {
        if (is_missing(row[k])) {
            throw Error("missing values in series '" + s.id + "'; pipeline needs an imputer");
        }
        v.push_back(row[k]);
    }
    return v;
}

void check_finite(const Forecasts &fc) {
    for (const auto &series : fc) {
        for (const auto &row : series) {
            for (double v : row) {
                if (!std::isfinite(v)) throw NumericalError("non-finite forecast value");
            }
        }
    }
}

// Gaussian elimination with partial pivoting; returns false on a singular
// pivot instead of throwing so callers can retry with regularization.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double> &out) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * out[c];
        out[r] = s / a[r][r];
    }
    return true;
}

double ses_sse(const std::vector<double> &y, double alpha) {
    double level = y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double e = y[t] - level;
        sse += e * e;
        level += alpha * e;
    }
    return sse;
}

struct HoltState {
    double level = 0.0;
    double trend = 0.0;
};

double holt_sse(const std::vector<double> &y, double alpha, double beta, double phi,
                HoltState *final_state = nullptr) {
    double l = y[0];
    double b = 0.0;  // zero initial trend: beta = 0 reduces exactly to SES
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double pred = l + phi * b;
        const double e = y[t] - pred;
        sse += e * e;
        const double l_prev = l;
        l = alpha * y[t] + (1.0 - alpha) * pred;
        b = beta * (l - l_prev) + (1.0 - beta) * phi * b;
    }
    if (final_state) *final_state = {l, b};
    return sse;
}

struct HwState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> season;  // indexed by t mod m
};

HwState hw_init(const std::vector<double> &y, std::size_t m) {
    double mean1 = 0.0, mean2 = 0.0;
    for (std::size_t t = 0; t < m; ++t) mean1 += y[t];
    for (std::size_t t = m; t < 2 * m; ++t) mean2 += y[t];
    mean1 /= static_cast<double>(m);
    mean2 /= static_cast<double>(m);
    HwState st;
    st.trend = (mean2 - mean1) / static_cast<double>(m);
    st.level = mean1 + st.trend * (static_cast<double>(m) - 1.0) / 2.0;
    st.season.resize(m);
    const double mid = (static_cast<double>(m) - 1.0) / 2.0;
    double sum = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        st.season[p] = y[p] - (mean1 + st.trend * (static_cast<double>(p) - mid));
        sum += st.season[p];
    }
    for (double &s : st.season) s -= sum / static_cast<double>(m);
    return st;
}

double hw_sse(const std::vector<double> &y, std::size_t m, double alpha, double beta, double gamma,
              HwState *final_state = nullptr) {
    HwState st = hw_init(y, m);
    double sse = 0.0;
    for (std::size_t t = m; t < y.size(); ++t) {
        const double s_prev = st.season[t % m];
        const double pred = st.level + st.trend + s_prev;
        const double e = y[t] - pred;
        sse += e * e;
        const double l_prev = st.level;
        const double b_prev = st.trend;
        st.level = alpha * (y[t] - s_prev) + (1.0 - alpha) * (st.level + st.trend);
        st.trend = beta * (st.level - l_prev) + (1.0 - beta) * b_prev;
        st.season[t % m] = gamma * (y[t] - l_prev - b_prev) + (1.0 - gamma) * s_prev;
    }
    if (final_state) *final_state = std::move(st);
    return sse;
}

constexpr double kSmoothLo = 1e-4;
constexpr double kSmoothHi = 0.9999;

// ---------------------------------------------------------------------------
// statistical family: independent per-series, per-dimension state
// ---------------------------------------------------------------------------

class StatForecaster : public Forecaster {
public:
    explicit StatForecaster(const ForecasterSpec &spec) : spec_(spec) {}

    void fit(const PanelDataset &train, const FitContext &ctx) override {
        states_ = nlohmann::json::array();
        m_ = std::max(1, ctx.seasonal_period);
        for (const auto &s : train.series) {
            ctx.check_deadline();
            nlohmann::json per_dim = nlohmann::json::array();
            for (std::size_t k = 0; k < s.target_dim(); ++k) {
                per_dim.push_back(fit_dim(dim_column(s, k), ctx));
            }
            states_.push_back(std::move(per_dim));
        }
    }

    Forecasts predict(int horizon) const override {
        if (states_.empty()) throw Error("predict before fit");
        Forecasts fc;
        for (const auto &per_dim : states_) {
            std::vector<std::vector<double>> rows(
                static_cast<std::size_t>(horizon),
                std::vector<double>(per_dim.size(), 0.0));
            for (std::size_t k = 0; k < per_dim.size(); ++k) {
                const auto path = predict_dim(per_dim[k], horizon);
                for (int h = 0; h < horizon; ++h) {
                    rows[static_cast<std::size_t>(h)][k] = path[static_cast<std::size_t>(h)];
                }
            }
            fc.push_back(std::move(rows));
        }
        check_finite(fc);
        return fc;
    }

    nlohmann::json save() const override {
        return {{"kind", spec_.kind},
                {"alpha", spec_.alpha},
                {"beta", spec_.beta},
                {"gamma", spec_.gamma},
                {"damped", spec_.damped},
                {"phi", spec_.phi},
                {"lags", spec_.lags},
                {"m", m_},
                {"states", states_}};
    }

    void restore(const nlohmann::json &j) {
        m_ = j.at("m").get<int>();
        states_ = j.at("states");
    }

protected:
    ForecasterSpec spec_;
    int m_ = 1;
    nlohmann::json states_;

    virtual nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &ctx) = 0;
    virtual std::vector<double> predict_dim(const nlohmann::json &state, int horizon) const = 0;
};

class NaiveForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &) override {
        return {{"last", y.back()}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        return std::vector<double>(static_cast<std::size_t>(horizon), st.at("last").get<double>());
    }
};

class SeasonalNaiveForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &) override {
        const std::size_t m = static_cast<std::size_t>(m_);
        if (y.size() < m) {
            throw InsufficientLengthError("seasonal naive needs at least one full season");
        }
        std::vector<double> season(y.end() - static_cast<long>(m), y.end());
        return {{"season", season}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        const auto season = st.at("season").get<std::vector<double>>();
        std::vector<double> out;
        for (int h = 0; h < horizon; ++h) {
            out.push_back(season[static_cast<std::size_t>(h) % season.size()]);
        }
        return out;
    }
};

class DriftForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &) override {
        if (y.size() < 2) throw InsufficientLengthError("drift needs at least two observations");
        const double slope = (y.back() - y.front()) / static_cast<double>(y.size() - 1);
        return {{"last", y.back()}, {"slope", slope}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        std::vector<double> out;
        for (int h = 1; h <= horizon; ++h) {
            out.push_back(st.at("last").get<double>() + st.at("slope").get<double>() * h);
        }
        return out;
    }
};

class SesForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &ctx) override {
        double alpha = spec_.alpha;
        if (alpha < 0.0) {
            alpha = 0.5;
            if (y.size() >= 3) {
                auto best = nelder_mead(
                    [&](const std::vector<double> &p) {
                        ctx.check_deadline();
                        return ses_sse(y, p[0]);
                    },
                    {0.5}, {kSmoothLo}, {kSmoothHi});
                alpha = best[0];
            }
        }
        double level = y[0];
        for (std::size_t t = 1; t < y.size(); ++t) level += alpha * (y[t] - level);
        return {{"level", level}, {"alpha", alpha}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        return std::vector<double>(static_cast<std::size_t>(horizon),
                                   st.at("level").get<double>());
    }
};

class HoltForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &ctx) override {
        if (y.size() < 2) throw InsufficientLengthError("holt needs at least two observations");
        double alpha = spec_.alpha;
        double beta = spec_.beta;
        double phi = spec_.damped ? spec_.phi : 1.0;
        if (alpha < 0.0 || beta < 0.0) {
            std::vector<double> start{0.5, 0.1};
            std::vector<double> lo{kSmoothLo, kSmoothLo};
            std::vector<double> hi{kSmoothHi, kSmoothHi};
            if (spec_.damped) {
                start.push_back(0.9);
                lo.push_back(0.80);
                hi.push_back(0.98);
            }
            auto best = nelder_mead(
                [&](const std::vector<double> &p) {
                    ctx.check_deadline();
                    return holt_sse(y, p[0], p[1], spec_.damped ? p[2] : 1.0);
                },
                start, lo, hi);
            alpha = best[0];
            beta = best[1];
            if (spec_.damped) phi = best[2];
        }
        HoltState st;
        holt_sse(y, alpha, beta, phi, &st);
        return {{"level", st.level}, {"trend", st.trend}, {"phi", phi}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        const double level = st.at("level").get<double>();
        const double trend = st.at("trend").get<double>();
        const double phi = st.at("phi").get<double>();
        std::vector<double> out;
        double damp = 0.0;
        double phi_pow = 1.0;
        for (int h = 1; h <= horizon; ++h) {
            phi_pow *= phi;
            damp += phi_pow;
            out.push_back(level + damp * trend);
        }
        return out;
    }
};

class HoltWintersForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &ctx) override {
        const std::size_t m = static_cast<std::size_t>(m_);
        if (m < 2) throw ConfigError("holt-winters needs seasonal period >= 2");
        if (y.size() < 2 * m) {
            throw InsufficientLengthError("holt-winters needs at least two full seasons");
        }
        double alpha = spec_.alpha;
        double beta = spec_.beta;
        double gamma = spec_.gamma;
        if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
            auto best = nelder_mead(
                [&](const std::vector<double> &p) {
                    ctx.check_deadline();
                    return hw_sse(y, m, p[0], p[1], p[2]);
                },
                {0.3, 0.05, 0.1}, {kSmoothLo, kSmoothLo, kSmoothLo},
                {kSmoothHi, kSmoothHi, kSmoothHi});
            alpha = best[0];
            beta = best[1];
            gamma = best[2];
        }
        HwState st;
        hw_sse(y, m, alpha, beta, gamma, &st);
        return {{"level", st.level},
                {"trend", st.trend},
                {"season", st.season},
                {"t_next", y.size() % m}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        const double level = st.at("level").get<double>();
        const double trend = st.at("trend").get<double>();
        const auto season = st.at("season").get<std::vector<double>>();
        const std::size_t t_next = st.at("t_next").get<std::size_t>();
        std::vector<double> out;
        for (int h = 0; h < horizon; ++h) {
            out.push_back(level + trend * (h + 1) +
                          season[(t_next + static_cast<std::size_t>(h)) % season.size()]);
        }
        return out;
    }
};

class ArForecaster : public StatForecaster {
public:
    using StatForecaster::StatForecaster;

protected:
    nlohmann::json fit_dim(const std::vector<double> &y, const FitContext &ctx) override {
        const std::size_t p = static_cast<std::size_t>(std::max(1, spec_.lags));
        if (y.size() <= p) {
            throw InsufficientLengthError("ar(" + std::to_string(p) + ") needs more than " +
                                          std::to_string(p) + " observations");
        }
        ctx.check_deadline();
        // normal equations over rows [y_{t-1} .. y_{t-p}, 1] -> y_t
        const std::size_t dim = p + 1;
        std::vector<std::vector<double>> ata(dim, std::vector<double>(dim, 0.0));
        std::vector<double> atb(dim, 0.0);
        for (std::size_t t = p; t < y.size(); ++t) {
            std::vector<double> row(dim, 1.0);
            for (std::size_t j = 0; j < p; ++j) row[j] = y[t - 1 - j];
            for (std::size_t a = 0; a < dim; ++a) {
                for (std::size_t b = 0; b < dim; ++b) ata[a][b] += row[a] * row[b];
                atb[a] += row[a] * y[t];
            }
        }
        std::vector<double> coef;
        if (!solve_linear(ata, atb, coef)) {
            for (std::size_t a = 0; a < dim; ++a) ata[a][a] += 1e-8;
            if (!solve_linear(ata, atb, coef)) {
                throw NumericalError("ar least squares is singular");
            }
        }
        std::vector<double> buffer(y.end() - static_cast<long>(p), y.end());
        return {{"coef", coef}, {"buffer", buffer}};
    }
    std::vector<double> predict_dim(const nlohmann::json &st, int horizon) const override {
        const auto coef = st.at("coef").get<std::vector<double>>();
        auto buffer = st.at("buffer").get<std::vector<double>>();  // oldest..newest
        const std::size_t p = buffer.size();
        std::vector<double> out;
        for (int h = 0; h < horizon; ++h) {
            double v = coef[p];  // intercept
            for (std::size_t j = 0; j < p; ++j) v += coef[j] * buffer[p - 1 - j];
            out.push_back(v);
            buffer.erase(buffer.begin());
            buffer.push_back(v);
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// reduction family: windowed tabular regression fitted jointly over all
// series, recursive multi-step prediction
// ---------------------------------------------------------------------------

class ReductionForecaster : public Forecaster {
public:
    explicit ReductionForecaster(const ForecasterSpec &spec) : spec_(spec) {}

    void fit(const PanelDataset &train, const FitContext &ctx) override {
        ctx.check_deadline();
        dim_ = train.series.front().target_dim();
        feature_cols_.clear();
        for (std::size_t f = 0; f < train.schema.size(); ++f) {
            // only columns with values available at forecast time are usable
            if (train.schema.future_known[f] && !train.series.front().past[f].num.empty()) {
                feature_cols_.push_back(f);
            }
        }
        std::vector<std::vector<double>> X;
        std::vector<std::vector<double>> Y;
        buffers_.clear();
        future_rows_.clear();
        for (const auto &s : train.series) {
            for (const auto &row : s.targets) {
                for (double v : row) {
                    if (is_missing(v)) {
                        throw Error("missing values in series '" + s.id +
                                    "'; pipeline needs an imputer");
                    }
                }
            }
            auto design = window_reduce(s, spec_.window, feature_cols_);
            X.insert(X.end(), design.X.begin(), design.X.end());
            Y.insert(Y.end(), design.Y.begin(), design.Y.end());
            buffers_.push_back({s.targets.end() - spec_.window, s.targets.end()});
            std::vector<std::vector<double>> fut;
            if (!feature_cols_.empty()) {
                std::size_t n_future = s.future.empty()
                                           ? 0
                                           : s.future[feature_cols_.front()].num.size();
                for (std::size_t h = 0; h < n_future; ++h) {
                    std::vector<double> row;
                    for (std::size_t f : feature_cols_) row.push_back(s.future[f].num[h]);
                    fut.push_back(std::move(row));
                }
            }
            future_rows_.push_back(std::move(fut));
        }
        fit_rows(X, Y, ctx);
    }

    Forecasts predict(int horizon) const override {
        Forecasts fc;
        for (std::size_t i = 0; i < buffers_.size(); ++i) {
            auto lags = buffers_[i];
            std::vector<std::vector<double>> rows;
            for (int h = 0; h < horizon; ++h) {
                std::vector<double> x;
                x.reserve(lags.size() * dim_ + feature_cols_.size());
                for (const auto &lag_row : lags) {
                    for (double v : lag_row) x.push_back(v);
                }
                if (!feature_cols_.empty()) {
                    if (static_cast<std::size_t>(h) >= future_rows_[i].size()) {
                        throw Error("future-known features cover fewer steps than the horizon");
                    }
                    for (double v : future_rows_[i][static_cast<std::size_t>(h)]) x.push_back(v);
                }
                auto yhat = predict_row(x);
                lags.erase(lags.begin());
                lags.push_back(yhat);
                rows.push_back(std::move(yhat));
            }
            fc.push_back(std::move(rows));
        }
        check_finite(fc);
        return fc;
    }

    nlohmann::json save() const override {
        nlohmann::json j;
        j["kind"] = spec_.kind;
        j["window"] = spec_.window;
        j["dim"] = dim_;
        j["feature_cols"] = feature_cols_;
        j["buffers"] = buffers_;
        j["future_rows"] = future_rows_;
        j["model"] = save_model();
        return j;
    }

    void restore(const nlohmann::json &j) {
        spec_.window = j.at("window").get<int>();
        dim_ = j.at("dim").get<std::size_t>();
        feature_cols_ = j.at("feature_cols").get<std::vector<std::size_t>>();
        buffers_ = j.at("buffers").get<std::vector<std::vector<std::vector<double>>>>();
        future_rows_ = j.at("future_rows").get<std::vector<std::vector<std::vector<double>>>>();
        load_model(j.at("model"));
    }

protected:
    ForecasterSpec spec_;
    std::size_t dim_ = 1;
    std::vector<std::size_t> feature_cols_;
    std::vector<std::vector<std::vector<double>>> buffers_;      // per series, w lag rows
    std::vector<std::vector<std::vector<double>>> future_rows_;  // per series, per step

    virtual void fit_rows(const std::vector<std::vector<double>> &X,
                          const std::vector<std::vector<double>> &Y, const FitContext &ctx) = 0;
    virtual std::vector<double> predict_row(const std::vector<double> &x) const = 0;
    virtual nlohmann::json save_model() const = 0;
    virtual void load_model(const nlohmann::json &j) = 0;
};

class RidgeForecaster : public ReductionForecaster {
public:
    using ReductionForecaster::ReductionForecaster;

protected:
    void fit_rows(const std::vector<std::vector<double>> &X,
                  const std::vector<std::vector<double>> &Y, const FitContext &ctx) override {
        ctx.check_deadline();
        const std::size_t f = X.front().size() + 1;  // + intercept
        std::vector<std::vector<double>> ata(f, std::vector<double>(f, 0.0));
        for (const auto &xr : X) {
            std::vector<double> row(xr);
            row.push_back(1.0);
            for (std::size_t a = 0; a < f; ++a) {
                for (std::size_t b = a; b < f; ++b) ata[a][b] += row[a] * row[b];
            }
        }
        for (std::size_t a = 0; a < f; ++a) {
            for (std::size_t b = 0; b < a; ++b) ata[a][b] = ata[b][a];
        }
        for (std::size_t a = 0; a + 1 < f; ++a) ata[a][a] += spec_.ridge_lambda;  // intercept free

        coef_.clear();
        for (std::size_t k = 0; k < dim_; ++k) {
            std::vector<double> atb(f, 0.0);
            for (std::size_t r = 0; r < X.size(); ++r) {
                for (std::size_t a = 0; a < f - 1; ++a) atb[a] += X[r][a] * Y[r][k];
                atb[f - 1] += Y[r][k];
            }
            std::vector<double> beta;
            if (!solve_linear(ata, atb, beta)) {
                auto regularized = ata;
                for (std::size_t a = 0; a < f; ++a) regularized[a][a] += 1e-8;
                if (!solve_linear(regularized, atb, beta)) {
                    throw NumericalError("ridge normal equations are singular");
                }
            }
            coef_.push_back(std::move(beta));
        }
    }

    std::vector<double> predict_row(const std::vector<double> &x) const override {
        std::vector<double> out(dim_, 0.0);
        for (std::size_t k = 0; k < dim_; ++k) {
            double v = coef_[k].back();
            for (std::size_t a = 0; a < x.size(); ++a) v += coef_[k][a] * x[a];
            out[k] = v;
        }
        return out;
    }

    nlohmann::json save_model() const override { return {{"coef", coef_}}; }
    void load_model(const nlohmann::json &j) override {
        coef_ = j.at("coef").get<std::vector<std::vector<double>>>();
    }

private:
    std::vector<std::vector<double>> coef_;  // per output dim
};

class BaggedTreesForecaster : public ReductionForecaster {
public:
    using ReductionForecaster::ReductionForecaster;

protected:
    void fit_rows(const std::vector<std::vector<double>> &X,
                  const std::vector<std::vector<double>> &Y, const FitContext &ctx) override {
        TreeParams params;
        params.max_depth = spec_.max_depth;
        params.min_leaf = 2;
        forests_.clear();
        for (std::size_t k = 0; k < dim_; ++k) {
            ctx.check_deadline();
            std::vector<double> y;
            y.reserve(Y.size());
            for (const auto &row : Y) y.push_back(row[k]);
            BaggedForest forest;
            forest.fit(X, y, spec_.n_trees, params, mix_seed(ctx.seed, k));
            forests_.push_back(std::move(forest));
        }
    }

    std::vector<double> predict_row(const std::vector<double> &x) const override {
        std::vector<double> out;
        for (const auto &forest : forests_) out.push_back(forest.predict(x));
        return out;
    }

    nlohmann::json save_model() const override {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &forest : forests_) arr.push_back(forest.save());
        return arr;
    }
    void load_model(const nlohmann::json &j) override {
        forests_.clear();
        for (const auto &e : j) forests_.push_back(BaggedForest::load(e));
    }

private:
    std::vector<BaggedForest> forests_;
};

class MlpForecaster : public ReductionForecaster {
public:
    using ReductionForecaster::ReductionForecaster;

protected:
    void fit_rows(const std::vector<std::vector<double>> &X,
                  const std::vector<std::vector<double>> &Y, const FitContext &ctx) override {
        std::vector<int> hidden(static_cast<std::size_t>(std::max(1, spec_.layers)),
                                std::max(1, spec_.hidden));
        net_ = Mlp(static_cast<int>(X.front().size()), hidden, static_cast<int>(dim_),
                   mix_seed(ctx.seed, 0xa11c));
        Rng shuffle_rng(mix_seed(ctx.seed, 0x5bff));
        std::vector<std::size_t> order(X.size());
        std::iota(order.begin(), order.end(), 0);
        const std::size_t batch = static_cast<std::size_t>(std::max(1, spec_.batch));
        for (int epoch = 0; epoch < spec_.epochs; ++epoch) {
            for (std::size_t i = order.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(
                    uniform_int(shuffle_rng, 0, static_cast<long long>(i) - 1));
                std::swap(order[i - 1], order[j]);
            }
            for (std::size_t start = 0; start < order.size(); start += batch) {
                ctx.check_deadline();
                std::vector<std::size_t> idx(
                    order.begin() + static_cast<long>(start),
                    order.begin() + static_cast<long>(std::min(start + batch, order.size())));
                net_.train_step(X, Y, idx, spec_.learning_rate);
            }
        }
    }

    std::vector<double> predict_row(const std::vector<double> &x) const override {
        return net_.forward(x);
    }

    nlohmann::json save_model() const override { return net_.save(); }
    void load_model(const nlohmann::json &j) override { net_ = Mlp::load(j); }

private:
    Mlp net_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec &spec) {
    if (spec.kind == "naive") return std::make_unique<NaiveForecaster>(spec);
    if (spec.kind == "snaive") return std::make_unique<SeasonalNaiveForecaster>(spec);
    if (spec.kind == "drift") return std::make_unique<DriftForecaster>(spec);
    if (spec.kind == "ses") return std::make_unique<SesForecaster>(spec);
    if (spec.kind == "holt") return std::make_unique<HoltForecaster>(spec);
    if (spec.kind == "holt_winters") return std::make_unique<HoltWintersForecaster>(spec);
    if (spec.kind == "ar") return std::make_unique<ArForecaster>(spec);
    if (spec.kind == "ridge") return std::make_unique<RidgeForecaster>(spec);
    if (spec.kind == "bagged_trees") return std::make_unique<BaggedTreesForecaster>(spec);
    if (spec.kind == "mlp") return std::make_unique<MlpForecaster>(spec);
    throw ConfigError("unknown forecaster kind '" + spec.kind + "'");
}

std::unique_ptr<Forecaster> load_forecaster(const nlohmann::json &j) {
    ForecasterSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    auto fc = make_forecaster(spec);
    if (auto *stat = dynamic_cast<StatForecaster *>(fc.get())) {
        stat->restore(j);
    } else if (auto *red = dynamic_cast<ReductionForecaster *>(fc.get())) {
        red->restore(j);
    }
    return fc;
}

}  // namespace chronoml
