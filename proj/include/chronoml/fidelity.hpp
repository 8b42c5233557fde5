#pragma once

#include <cstddef>
#include <vector>

#include "chronoml/series.hpp"

namespace chronoml {

struct BudgetSpec {
    double b_min = 1.0 / 9.0;
    double b_max = 1.0;
    int eta = 3;
    int l_min = 500;

    void validate() const;
};

// Window length for budget b: the budget expands a window backward from the
// end of the series. Fidelity is deactivated (full series) when T <= l_min;
// otherwise the window is max(ceil(b*T), l_min) capped at T, so that b = 1
// always covers the whole series.
std::size_t window_length(double b, std::size_t T, int l_min);

// Keeps only the trailing window of targets and past features per series;
// future features untouched.
PanelDataset truncate(const PanelDataset &dataset, double b, int l_min);

struct Rung {
    double budget = 1.0;
    std::size_t survivors = 1;
};

// Geometric budget ladder b_min * eta^j capped at b_max, with survivor counts
// max(floor(n_initial / eta^j), 1).
std::vector<Rung> sh_schedule(const BudgetSpec &spec, std::size_t n_initial);

// Indices of the `n_promote` lowest-loss entries, ties and the all-failed
// degenerate case resolved by evaluation order.
std::vector<std::size_t> promote(const std::vector<double> &losses, std::size_t n_promote);

}  // namespace chronoml
