#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "chronoml/errors.hpp"

namespace chronoml {

// Missing observations are stored as quiet NaN. The loader turns empty target
// cells into this marker; only pipeline imputers remove it.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double x) { return std::isnan(x); }

struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<bool> categorical;
    std::vector<bool> future_known;

    std::size_t size() const { return names.size(); }
    bool operator==(const FeatureSchema &) const = default;
};

// One feature column of a single series. Exactly one of num/cat is populated,
// according to the schema's categorical flag.
struct FeatureColumn {
    std::vector<double> num;
    std::vector<std::string> cat;

    bool operator==(const FeatureColumn &) const = default;
};

struct TimeSeriesRecord {
    std::string id;
    std::vector<std::vector<double>> targets;  // T rows, d columns
    std::vector<FeatureColumn> past;           // one per schema column, length T
    std::vector<FeatureColumn> future;         // future-known columns only, length H

    std::size_t length() const { return targets.size(); }
    std::size_t target_dim() const { return targets.empty() ? 0 : targets.front().size(); }

    bool operator==(const TimeSeriesRecord &) const = default;
};

struct PanelDataset {
    std::string name;
    int horizon = 1;
    int seasonal_period = 1;
    FeatureSchema schema;
    std::vector<TimeSeriesRecord> series;

    std::size_t size() const { return series.size(); }
    void validate() const;

    bool operator==(const PanelDataset &) const = default;
};

struct TemporalSplit {
    PanelDataset train;
    PanelDataset validation;  // the final `horizon` observations of every series
    int horizon = 1;
};

// Long-format CSV plus metadata JSON. See README for the file contract.
PanelDataset load_dataset(const std::string &csv_path, const std::string &meta_path);
void save_dataset(const PanelDataset &dataset, const std::string &csv_path,
                  const std::string &meta_path);

TemporalSplit temporal_holdout(const PanelDataset &dataset, int horizon);

// Last min(h, T_i) target observations, original order.
std::vector<std::vector<double>> tail(const TimeSeriesRecord &series, int h);

// Dimension-0 tail, z-normalized over the tail window (population convention,
// zero vector when the window is constant). Used for dataset similarity.
std::vector<double> normalized_tail(const TimeSeriesRecord &series, int h);

}  // namespace chronoml
