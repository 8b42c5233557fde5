#include "chronoml/ensemble.hpp"

#include <limits>

#include "chronoml/errors.hpp"

namespace chronoml {

Forecasts average_forecasts(const std::vector<const Forecasts *> &members) {
    if (members.empty()) throw Error("cannot average an empty ensemble");
    Forecasts avg = *members.front();
    for (std::size_t m = 1; m < members.size(); ++m) {
        const Forecasts &fc = *members[m];
        for (std::size_t i = 0; i < avg.size(); ++i) {
            for (std::size_t h = 0; h < avg[i].size(); ++h) {
                for (std::size_t k = 0; k < avg[i][h].size(); ++k) {
                    avg[i][h][k] += fc[i][h][k];
                }
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(members.size());
    for (auto &series : avg) {
        for (auto &row : series) {
            for (double &v : row) v *= scale;
        }
    }
    return avg;
}

EnsembleModel ensemble_select(const std::vector<Candidate> &pool, std::size_t k,
                              const std::function<double(const Forecasts &)> &loss) {
    if (pool.empty()) throw Error("ensemble selection requires a non-empty pool");
    if (k < 1) throw Error("ensemble size must be >= 1");

    std::size_t seed_idx = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].validation_loss < pool[seed_idx].validation_loss) seed_idx = i;
    }

    std::vector<std::size_t> current{seed_idx};
    std::vector<const Forecasts *> member_fc{&pool[seed_idx].validation_forecasts};
    double current_loss = loss(average_forecasts(member_fc));

    EnsembleModel best;
    best.members = {pool[seed_idx].id};
    best.validation_loss = current_loss;

    while (current.size() < k) {
        std::size_t best_add = pool.size();
        double best_add_loss = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            member_fc.push_back(&pool[i].validation_forecasts);
            const double l = loss(average_forecasts(member_fc));
            member_fc.pop_back();
            if (l < best_add_loss) {  // strict: ties keep the lower candidate id
                best_add_loss = l;
                best_add = i;
            }
        }
        if (best_add == pool.size() || best_add_loss >= current_loss) break;  // no improvement
        current.push_back(best_add);
        member_fc.push_back(&pool[best_add].validation_forecasts);
        current_loss = best_add_loss;
        if (current_loss < best.validation_loss) {
            best.members.clear();
            for (std::size_t i : current) best.members.push_back(pool[i].id);
            best.validation_loss = current_loss;
        }
    }
    return best;
}

}  // namespace chronoml
