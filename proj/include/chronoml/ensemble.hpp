#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "chronoml/forecasters.hpp"

namespace chronoml {

struct Candidate {
    int id = 0;                    // trial index
    Forecasts validation_forecasts;
    double validation_loss = 0.0;
};

struct EnsembleModel {
    std::vector<int> members;  // candidate ids, multiplicity = weight
    double validation_loss = 0.0;
};

// Elementwise mean over member forecasts (weights = multiplicities).
Forecasts average_forecasts(const std::vector<const Forecasts *> &members);

// Caruana-style greedy forward selection with replacement: start from the
// single best candidate, then add whichever candidate minimizes the loss of
// the averaged forecast, keeping the best intermediate ensemble seen. Ties
// break by candidate id order.
EnsembleModel ensemble_select(const std::vector<Candidate> &pool, std::size_t k,
                              const std::function<double(const Forecasts &)> &loss);

}  // namespace chronoml
