#include "chronoml/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronoml/errors.hpp"

namespace chronoml {

void BudgetSpec::validate() const {
    if (!(0.0 < b_min && b_min < b_max && b_max <= 1.0)) {
        throw ConfigError("budget spec requires 0 < b_min < b_max <= 1");
    }
    if (eta < 2) throw ConfigError("halving rate eta must be >= 2");
    if (l_min < 1) throw ConfigError("l_min must be >= 1");
}

std::size_t window_length(double b, std::size_t T, int l_min) {
    if (!(b > 0.0 && b <= 1.0)) throw ConfigError("budget must lie in (0, 1]");
    const std::size_t lm = static_cast<std::size_t>(std::max(1, l_min));
    if (T <= lm) return T;
    const std::size_t w = static_cast<std::size_t>(std::ceil(b * static_cast<double>(T)));
    return std::min(T, std::max(w, lm));
}

PanelDataset truncate(const PanelDataset &dataset, double b, int l_min) {
    PanelDataset out = dataset;
    for (auto &s : out.series) {
        const std::size_t keep = window_length(b, s.length(), l_min);
        const std::size_t drop = s.length() - keep;
        if (drop == 0) continue;
        s.targets.erase(s.targets.begin(), s.targets.begin() + static_cast<long>(drop));
        for (auto &col : s.past) {
            if (!col.num.empty()) {
                col.num.erase(col.num.begin(), col.num.begin() + static_cast<long>(drop));
            }
            if (!col.cat.empty()) {
                col.cat.erase(col.cat.begin(), col.cat.begin() + static_cast<long>(drop));
            }
        }
    }
    return out;
}

std::vector<Rung> sh_schedule(const BudgetSpec &spec, std::size_t n_initial) {
    spec.validate();
    if (n_initial < 1) throw ConfigError("successive halving needs n_initial >= 1");
    std::vector<Rung> rungs;
    double budget = spec.b_min;
    std::size_t divisor = 1;
    const double tol = 1.0 + 1e-12;
    for (int j = 0;; ++j) {
        Rung rung;
        rung.budget = std::min(budget, spec.b_max);
        rung.survivors = std::max<std::size_t>(n_initial / divisor, 1);
        rungs.push_back(rung);
        if (budget * tol >= spec.b_max) break;
        budget *= spec.eta;
        divisor *= static_cast<std::size_t>(spec.eta);
        if (budget > spec.b_max * tol) {
            // only hit when b_max is not on the geometric grid
            Rung top;
            top.budget = spec.b_max;
            top.survivors = std::max<std::size_t>(n_initial / divisor, 1);
            rungs.push_back(top);
            break;
        }
    }
    return rungs;
}

std::vector<std::size_t> promote(const std::vector<double> &losses, std::size_t n_promote) {
    std::vector<std::size_t> order(losses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
    order.resize(std::min(n_promote, order.size()));
    return order;
}

}  // namespace chronoml
