#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chronoml/config_space.hpp"
#include "chronoml/metalearn.hpp"
#include "chronoml/tree.hpp"

namespace chronoml {

// Random-forest surrogate over (encoded configuration ++ budget) -> loss.
// Mean is the average of tree outputs; variance the across-tree empirical
// variance floored at 1e-12.
class SurrogateModel {
public:
    static constexpr int kTrees = 32;
    static constexpr double kVarianceFloor = 1e-12;

    // rows = encoded configuration with the budget appended as the last
    // feature. Requires at least 2 rows.
    static SurrogateModel fit(const std::vector<std::vector<double>> &rows,
                              const std::vector<double> &losses, std::uint64_t seed);

    std::pair<double, double> predict(const std::vector<double> &x) const;  // mean, variance

private:
    BaggedForest forest_;
};

// Closed-form expected improvement: (f_min - mu) Phi(z) + sigma phi(z) with
// z = (f_min - mu) / sigma; the sigma -> 0 limit is max(f_min - mu, 0).
double expected_improvement(double mu, double variance, double f_min);

// EI(x) * pi(config)^(beta/n); the factor is 1 when no prior is supplied and
// 0 when the prior density is 0.
double prior_weighted_acquisition(const SurrogateModel &model, const std::vector<double> &x,
                                  double f_min, const Configuration &config,
                                  const PriorModel *prior, std::size_t n, double beta);

struct ProposeInputs {
    const SurrogateModel *model = nullptr;  // null -> fall back to sampling
    double f_min = 0.0;
    std::size_t n_trials = 1;  // decay denominator of the prior exponent
    double beta = 10.0;
    const PriorModel *prior = nullptr;
    double budget = 1.0;  // budget feature the acquisition conditions on
    // best historical configurations (lowest loss first) seeding local search
    std::vector<Configuration> incumbents;
    int random_candidates = 500;
    int chains = 10;
    int chain_length = 20;
};

// Maximizes the prior-weighted acquisition over 500 random samples plus local
// search chains around the incumbents; ties break toward earlier generation.
Configuration propose(const ConfigSpace &space, const ProposeInputs &inputs, Rng &rng);

}  // namespace chronoml
