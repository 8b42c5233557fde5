#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "chronoml/rng.hpp"

namespace chronoml {

struct TreeParams {
    int max_depth = -1;          // -1 = unbounded
    int min_leaf = 1;
    int features_per_split = 0;  // 0 = all features
    // Split thresholds are searched on at most this many rows per node; the
    // chosen split still partitions every row.
    int split_sample = 1024;
};

// CART regression tree with variance-reduction splits.
class RegressionTree {
public:
    void fit(const std::vector<std::vector<double>> &X, const std::vector<double> &y,
             const std::vector<std::size_t> &rows, const TreeParams &params, Rng &rng);
    double predict(const std::vector<double> &x) const;

    nlohmann::json save() const;
    static RegressionTree load(const nlohmann::json &j);

private:
    struct Node {
        int feature = -1;  // -1 = leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;
    };
    std::vector<Node> nodes_;

    int build(const std::vector<std::vector<double>> &X, const std::vector<double> &y,
              std::vector<std::size_t> &rows, std::size_t begin, std::size_t end, int depth,
              const TreeParams &params, Rng &rng);
};

// Bootstrap-aggregated trees; mean prediction, across-tree variance.
class BaggedForest {
public:
    void fit(const std::vector<std::vector<double>> &X, const std::vector<double> &y, int n_trees,
             const TreeParams &params, std::uint64_t seed);
    double predict(const std::vector<double> &x) const;
    // mean and across-tree empirical variance (no floor applied here)
    std::pair<double, double> predict_dist(const std::vector<double> &x) const;
    std::size_t size() const { return trees_.size(); }

    nlohmann::json save() const;
    static BaggedForest load(const nlohmann::json &j);

private:
    std::vector<RegressionTree> trees_;
};

}  // namespace chronoml
