#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "chronoml/rng.hpp"

namespace chronoml {

// Small feedforward network: tanh hidden layers, linear output, mean squared
// error loss, plain SGD. Everything is explicit so gradients can be checked
// against finite differences.
class Mlp {
public:
    Mlp() = default;
    Mlp(int inputs, const std::vector<int> &hidden, int outputs, std::uint64_t seed);

    std::vector<double> forward(const std::vector<double> &x) const;

    // One SGD step on the batch; returns the batch MSE before the update.
    double train_step(const std::vector<std::vector<double>> &X,
                      const std::vector<std::vector<double>> &Y,
                      const std::vector<std::size_t> &batch, double learning_rate);

    // Batch MSE and the gradient of it with respect to every parameter.
    double loss(const std::vector<std::vector<double>> &X,
                const std::vector<std::vector<double>> &Y,
                const std::vector<std::size_t> &batch) const;
    std::vector<double> gradient(const std::vector<std::vector<double>> &X,
                                 const std::vector<std::vector<double>> &Y,
                                 const std::vector<std::size_t> &batch) const;

    std::vector<double> &parameters() { return params_; }
    const std::vector<double> &parameters() const { return params_; }

    nlohmann::json save() const;
    static Mlp load(const nlohmann::json &j);

private:
    std::vector<int> layer_sizes_;  // [inputs, hidden..., outputs]
    std::vector<double> params_;    // weights then bias, layer by layer

    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;
};

}  // namespace chronoml
