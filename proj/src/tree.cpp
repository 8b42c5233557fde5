#include "chronoml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronoml/errors.hpp"

namespace chronoml {
namespace {

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // sum-of-squares reduction
};

double subset_mean(const std::vector<double> &y, const std::vector<std::size_t> &rows,
                   std::size_t begin, std::size_t end) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += y[rows[i]];
    return sum / static_cast<double>(end - begin);
}

}  // namespace

int RegressionTree::build(const std::vector<std::vector<double>> &X, const std::vector<double> &y,
                          std::vector<std::size_t> &rows, std::size_t begin, std::size_t end,
                          int depth, const TreeParams &params, Rng &rng) {
    const std::size_t n = end - begin;
    Node node;
    node.value = subset_mean(y, rows, begin, end);

    bool make_leaf = n < 2 * static_cast<std::size_t>(params.min_leaf) ||
                     (params.max_depth >= 0 && depth >= params.max_depth);
    if (!make_leaf) {
        bool constant = true;
        for (std::size_t i = begin + 1; i < end && constant; ++i) {
            constant = y[rows[i]] == y[rows[begin]];
        }
        make_leaf = constant;
    }
    if (make_leaf) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        return id;
    }

    const std::size_t dims = X[rows[begin]].size();
    std::vector<int> feats(dims);
    std::iota(feats.begin(), feats.end(), 0);
    std::size_t n_feats = dims;
    if (params.features_per_split > 0 && static_cast<std::size_t>(params.features_per_split) < dims) {
        // partial Fisher-Yates for the feature subset
        n_feats = static_cast<std::size_t>(params.features_per_split);
        for (std::size_t i = 0; i < n_feats; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_int(
                                          rng, 0, static_cast<long long>(dims - i) - 1));
            std::swap(feats[i], feats[j]);
        }
    }

    // For large nodes, thresholds are scanned on a sampled subset of rows.
    std::vector<std::size_t> scan(rows.begin() + static_cast<long>(begin),
                                  rows.begin() + static_cast<long>(end));
    if (params.split_sample > 0 && scan.size() > static_cast<std::size_t>(params.split_sample)) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(params.split_sample); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_int(
                                          rng, 0, static_cast<long long>(scan.size() - i) - 1));
            std::swap(scan[i], scan[j]);
        }
        scan.resize(static_cast<std::size_t>(params.split_sample));
    }

    SplitCandidate best;
    std::vector<std::pair<double, double>> vals(scan.size());
    for (std::size_t fi = 0; fi < n_feats; ++fi) {
        const int f = feats[fi];
        for (std::size_t i = 0; i < scan.size(); ++i) {
            vals[i] = {X[scan[i]][static_cast<std::size_t>(f)], y[scan[i]]};
        }
        std::sort(vals.begin(), vals.end());
        double total = 0.0;
        for (const auto &[xv, yv] : vals) total += yv;
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left_sum += vals[i].second;
            if (vals[i].first == vals[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(vals.size() - i - 1);
            const double right_sum = total - left_sum;
            const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
            if (best.feature < 0 || score > best.score) {
                best.feature = f;
                best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                best.score = score;
            }
        }
    }

    if (best.feature < 0) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        return id;
    }

    const auto split_point = std::partition(
        rows.begin() + static_cast<long>(begin), rows.begin() + static_cast<long>(end),
        [&](std::size_t r) {
            return X[r][static_cast<std::size_t>(best.feature)] <= best.threshold;
        });
    const std::size_t mid = static_cast<std::size_t>(split_point - rows.begin());
    if (mid == begin || mid == end ||
        mid - begin < static_cast<std::size_t>(params.min_leaf) ||
        end - mid < static_cast<std::size_t>(params.min_leaf)) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        return id;
    }

    node.feature = best.feature;
    node.threshold = best.threshold;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(X, y, rows, begin, mid, depth + 1, params, rng);
    const int right = build(X, y, rows, mid, end, depth + 1, params, rng);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

void RegressionTree::fit(const std::vector<std::vector<double>> &X, const std::vector<double> &y,
                         const std::vector<std::size_t> &rows, const TreeParams &params, Rng &rng) {
    if (rows.empty()) throw Error("cannot fit a tree on zero rows");
    nodes_.clear();
    std::vector<std::size_t> work = rows;
    build(X, y, work, 0, work.size(), 0, params, rng);
}

double RegressionTree::predict(const std::vector<double> &x) const {
    int id = 0;
    while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
        const Node &n = nodes_[static_cast<std::size_t>(id)];
        id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(id)].value;
}

nlohmann::json RegressionTree::save() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &n : nodes_) {
        arr.push_back({n.feature, n.threshold, n.value, n.left, n.right});
    }
    return arr;
}

RegressionTree RegressionTree::load(const nlohmann::json &j) {
    RegressionTree t;
    for (const auto &e : j) {
        Node n;
        n.feature = e.at(0).get<int>();
        n.threshold = e.at(1).get<double>();
        n.value = e.at(2).get<double>();
        n.left = e.at(3).get<int>();
        n.right = e.at(4).get<int>();
        t.nodes_.push_back(n);
    }
    return t;
}

void BaggedForest::fit(const std::vector<std::vector<double>> &X, const std::vector<double> &y,
                       int n_trees, const TreeParams &params, std::uint64_t seed) {
    if (X.empty() || X.size() != y.size()) throw Error("forest fit: bad training data");
    trees_.clear();
    trees_.resize(static_cast<std::size_t>(n_trees));
    const std::size_t n = X.size();
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        Rng rng(mix_seed(seed, t));
        std::vector<std::size_t> rows(n);
        for (auto &r : rows) {
            r = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long long>(n) - 1));
        }
        trees_[t].fit(X, y, rows, params, rng);
    }
}

double BaggedForest::predict(const std::vector<double> &x) const {
    double sum = 0.0;
    for (const auto &t : trees_) sum += t.predict(x);
    return sum / static_cast<double>(trees_.size());
}

std::pair<double, double> BaggedForest::predict_dist(const std::vector<double> &x) const {
    double sum = 0.0;
    double sq = 0.0;
    for (const auto &t : trees_) {
        const double p = t.predict(x);
        sum += p;
        sq += p * p;
    }
    const double n = static_cast<double>(trees_.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sq / n - mean * mean);
    return {mean, var};
}

nlohmann::json BaggedForest::save() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &t : trees_) arr.push_back(t.save());
    return arr;
}

BaggedForest BaggedForest::load(const nlohmann::json &j) {
    BaggedForest f;
    for (const auto &e : j) f.trees_.push_back(RegressionTree::load(e));
    return f;
}

}  // namespace chronoml
