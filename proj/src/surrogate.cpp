#include "chronoml/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "chronoml/errors.hpp"

namespace chronoml {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

SurrogateModel SurrogateModel::fit(const std::vector<std::vector<double>> &rows,
                                   const std::vector<double> &losses, std::uint64_t seed) {
    if (rows.size() < 2) throw Error("surrogate needs at least 2 observations");
    TreeParams params;
    params.max_depth = -1;
    params.min_leaf = 1;
    params.features_per_split =
        static_cast<int>((rows.front().size() + 2) / 3);  // ceil(dims / 3)
    SurrogateModel model;
    model.forest_.fit(rows, losses, kTrees, params, seed);
    return model;
}

std::pair<double, double> SurrogateModel::predict(const std::vector<double> &x) const {
    auto [mean, var] = forest_.predict_dist(x);
    return {mean, std::max(var, kVarianceFloor)};
}

double expected_improvement(double mu, double variance, double f_min) {
    const double sigma = std::sqrt(std::max(variance, 0.0));
    if (sigma < 1e-9) return std::max(f_min - mu, 0.0);
    const double z = (f_min - mu) / sigma;
    return std::max(0.0, (f_min - mu) * normal_cdf(z) + sigma * normal_pdf(z));
}

double prior_weighted_acquisition(const SurrogateModel &model, const std::vector<double> &x,
                                  double f_min, const Configuration &config,
                                  const PriorModel *prior, std::size_t n, double beta) {
    const auto [mu, var] = model.predict(x);
    const double ei = expected_improvement(mu, var, f_min);
    if (!prior) return ei;
    const double pi = prior->density(config);
    if (pi <= 0.0) return 0.0;
    return ei * std::pow(pi, beta / static_cast<double>(std::max<std::size_t>(n, 1)));
}

Configuration propose(const ConfigSpace &space, const ProposeInputs &inputs, Rng &rng) {
    if (!inputs.model) {
        return inputs.prior ? inputs.prior->sample(rng) : space.sample(rng);
    }

    const auto score = [&](const Configuration &c) {
        auto x = space.encode(c);
        x.push_back(inputs.budget);
        return prior_weighted_acquisition(*inputs.model, x, inputs.f_min, c, inputs.prior,
                                          inputs.n_trials, inputs.beta);
    };

    Configuration best;
    double best_score = -1.0;
    const auto consider = [&](const Configuration &c, double s) {
        if (s > best_score) {  // strict: ties keep the earlier candidate
            best_score = s;
            best = c;
        }
    };

    for (int i = 0; i < inputs.random_candidates; ++i) {
        Configuration c = space.sample(rng);
        consider(c, score(c));
    }

    const int chains = std::min<int>(inputs.chains, static_cast<int>(inputs.incumbents.size()));
    for (int chain = 0; chain < chains; ++chain) {
        Configuration current = inputs.incumbents[static_cast<std::size_t>(chain)];
        double current_score = score(current);
        consider(current, current_score);
        for (int step = 0; step < inputs.chain_length; ++step) {
            Configuration next = space.neighbor(current, rng);
            const double next_score = score(next);
            consider(next, next_score);
            if (next_score > current_score) {  // hill climb on the acquisition
                current = std::move(next);
                current_score = next_score;
            }
        }
    }

    if (best_score < 0.0) return space.sample(rng);
    return best;
}

}  // namespace chronoml
