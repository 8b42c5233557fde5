#pragma once

#include <string>
#include <vector>

#include "chronoml/rng.hpp"
#include "chronoml/series.hpp"

namespace chronoml::testing {

inline TimeSeriesRecord make_series(const std::string &id, const std::vector<double> &values) {
    TimeSeriesRecord rec;
    rec.id = id;
    for (double v : values) rec.targets.push_back({v});
    return rec;
}

inline PanelDataset make_panel(const std::vector<std::vector<double>> &series, int horizon = 1,
                               int m = 1, const std::string &name = "panel") {
    PanelDataset ds;
    ds.name = name;
    ds.horizon = horizon;
    ds.seasonal_period = m;
    for (std::size_t i = 0; i < series.size(); ++i) {
        ds.series.push_back(make_series("s" + std::to_string(i), series[i]));
    }
    return ds;
}

inline std::vector<double> random_walk(Rng &rng, std::size_t n) {
    std::vector<double> v;
    double x = uniform_real(rng, -5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i) {
        x += normal(rng);
        v.push_back(x);
    }
    return v;
}

inline std::vector<double> dim0(const std::vector<std::vector<double>> &rows) {
    std::vector<double> v;
    for (const auto &r : rows) v.push_back(r.front());
    return v;
}

}  // namespace chronoml::testing
