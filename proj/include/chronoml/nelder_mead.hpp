#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace chronoml {

struct NelderMeadOptions {
    int max_iterations = 500;
    double tolerance = 1e-8;
};

// Bounded Nelder-Mead: candidate points are clamped into [lo, hi] box.
// Returns the best point found.
inline std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double> &)> &objective,
    std::vector<double> start, const std::vector<double> &lo, const std::vector<double> &hi,
    const NelderMeadOptions &opts = {}) {
    const std::size_t n = start.size();
    const auto clamp = [&](std::vector<double> p) {
        for (std::size_t i = 0; i < n; ++i) p[i] = std::min(hi[i], std::max(lo[i], p[i]));
        return p;
    };

    std::vector<std::vector<double>> simplex;
    std::vector<double> values;
    simplex.push_back(clamp(start));
    values.push_back(objective(simplex[0]));
    for (std::size_t i = 0; i < n; ++i) {
        auto p = simplex[0];
        const double step = 0.1 * (hi[i] - lo[i]);
        p[i] = p[i] + step <= hi[i] ? p[i] + step : p[i] - step;
        simplex.push_back(clamp(p));
        values.push_back(objective(simplex.back()));
    }

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> v2;
            for (std::size_t i : order) {
                s2.push_back(simplex[i]);
                v2.push_back(values[i]);
            }
            simplex = std::move(s2);
            values = std::move(v2);
        }
        if (std::abs(values.back() - values.front()) <
            opts.tolerance * (1.0 + std::abs(values.front()))) {
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (double &c : centroid) c /= static_cast<double>(n);

        const auto point = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) {
                p[k] = centroid[k] + coeff * (centroid[k] - simplex.back()[k]);
            }
            return clamp(p);
        };

        auto reflected = point(1.0);
        const double fr = objective(reflected);
        if (fr < values.front()) {
            auto expanded = point(2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                simplex.back() = expanded;
                values.back() = fe;
            } else {
                simplex.back() = reflected;
                values.back() = fr;
            }
        } else if (fr < values[values.size() - 2]) {
            simplex.back() = reflected;
            values.back() = fr;
        } else {
            auto contracted = point(-0.5);
            const double fc = objective(contracted);
            if (fc < values.back()) {
                simplex.back() = contracted;
                values.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    for (std::size_t k = 0; k < n; ++k) {
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    }
                    values[i] = objective(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return simplex[best];
}

}  // namespace chronoml
