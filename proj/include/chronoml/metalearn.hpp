#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoml/config_space.hpp"
#include "chronoml/series.hpp"

namespace chronoml {

// Classic dynamic-programming DTW with absolute-difference local cost, full
// alignment, no warping window.
double dtw(const std::vector<double> &a, const std::vector<double> &b);

// Mean DTW over all cross pairs of per-series z-normalized tails (last h
// observations of each series, dimension 0).
double dataset_distance(const PanelDataset &e, const PanelDataset &f, int h);

struct KbConfig {
    Configuration config;
    double loss = 0.0;
};

struct KbEntry {
    std::string name;
    std::vector<std::vector<double>> tails;  // per series, z-normalized
    std::vector<KbConfig> configs;           // best configurations, ranked by loss
};

struct MetaKnowledgeBase {
    std::string space_version;
    std::vector<KbEntry> entries;

    void save(const std::string &path) const;
    static MetaKnowledgeBase load(const std::string &path);
    nlohmann::json to_json() const;
    static MetaKnowledgeBase from_json(const nlohmann::json &j);

    // Union of configurations per dataset name, re-ranked by loss, top n_c
    // kept. Merging a kb with itself is the identity.
    void merge(const MetaKnowledgeBase &other, std::size_t n_c);
};

// Per-hyperparameter weighted densities over the normalized [0,1] coordinate
// space: truncated Gaussian KDE for numerics, Laplace-smoothed weighted
// frequencies for categoricals. The density of a full configuration is the
// product over its active parameters.
class PriorModel {
public:
    static constexpr double kCategoricalFloor = 0.1;

    // kb entries must already exclude the target dataset (leave-one-out is the
    // caller's responsibility). If fewer than n_d entries exist, all are used.
    static PriorModel build(const MetaKnowledgeBase &kb, const PanelDataset &new_dataset,
                            const ConfigSpace &space, std::size_t n_d, int h);

    double density(const Configuration &config) const;
    Configuration sample(Rng &rng) const;

    // Density of one parameter at normalized coordinate u (numeric) or choice
    // index (categorical); exposed for the quadrature checks.
    double numeric_density(const std::string &param, double u) const;
    double categorical_mass(const std::string &param, const std::string &choice) const;

    const std::vector<double> &source_weights() const { return weights_; }
    const ConfigSpace &space() const { return *space_; }

private:
    struct NumericPrior {
        std::vector<double> locs;     // normalized sample locations
        std::vector<double> weights;  // nonnegative, at least one positive
        double bandwidth = 0.1;
    };
    struct CatPrior {
        std::vector<double> masses;  // per choice, sums to 1
    };

    const ConfigSpace *space_ = nullptr;
    std::vector<double> weights_;  // per selected kb entry (Eq-style normalization)
    std::map<std::string, NumericPrior> numeric_;
    std::map<std::string, CatPrior> categorical_;

    friend PriorModel make_prior_for_tests(const ConfigSpace &);
};

// Normalized distance weights: 1 - (d - min) / (max - min); all ones when the
// distances coincide.
std::vector<double> distance_weights(const std::vector<double> &distances);

}  // namespace chronoml
