#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoml/deadline.hpp"
#include "chronoml/series.hpp"

namespace chronoml {

struct FitContext {
    int seasonal_period = 1;
    std::uint64_t seed = 0;
    const Deadline *deadline = nullptr;

    void check_deadline() const {
        if (deadline) deadline->check();
    }
};

// Model selector plus all hyperparameters any model may carry. Smoothing
// parameters set to a negative value are fitted by bounded Nelder-Mead on the
// in-sample one-step squared error.
struct ForecasterSpec {
    std::string kind;  // naive, snaive, drift, ses, holt, holt_winters, ar,
                       // ridge, bagged_trees, mlp
    double alpha = -1.0;
    double beta = -1.0;
    double gamma = -1.0;
    bool damped = false;
    double phi = 0.95;
    int lags = 1;               // ar order
    double ridge_lambda = 0.0;  // ridge
    int n_trees = 50;           // bagged_trees
    int max_depth = 8;
    int window = 8;             // reduction window for ridge/bagged_trees/mlp
    int hidden = 16;            // mlp
    int layers = 1;
    double learning_rate = 0.01;
    int epochs = 50;
    int batch = 32;
};

using Forecasts = std::vector<std::vector<std::vector<double>>>;  // [series][step][dim]

class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual void fit(const PanelDataset &train, const FitContext &ctx) = 0;
    // H finite values per series per target dimension; future-known features
    // are captured from the training panel at fit time.
    virtual Forecasts predict(int horizon) const = 0;
    virtual nlohmann::json save() const = 0;
};

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec &spec);
std::unique_ptr<Forecaster> load_forecaster(const nlohmann::json &j);

}  // namespace chronoml
