#include "chronoml/mlp.hpp"

#include <cmath>

#include "chronoml/errors.hpp"

namespace chronoml {

Mlp::Mlp(int inputs, const std::vector<int> &hidden, int outputs, std::uint64_t seed) {
    layer_sizes_.push_back(inputs);
    for (int h : hidden) layer_sizes_.push_back(h);
    layer_sizes_.push_back(outputs);

    std::size_t count = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        count += static_cast<std::size_t>(layer_sizes_[l]) *
                     static_cast<std::size_t>(layer_sizes_[l + 1]) +
                 static_cast<std::size_t>(layer_sizes_[l + 1]);
    }
    params_.resize(count);
    Rng rng(seed);
    std::size_t p = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        const double bound = std::sqrt(6.0 / (layer_sizes_[l] + layer_sizes_[l + 1]));
        const std::size_t n_w = static_cast<std::size_t>(layer_sizes_[l]) *
                                static_cast<std::size_t>(layer_sizes_[l + 1]);
        for (std::size_t i = 0; i < n_w; ++i) params_[p++] = uniform_real(rng, -bound, bound);
        for (int i = 0; i < layer_sizes_[l + 1]; ++i) params_[p++] = 0.0;
    }
}

std::size_t Mlp::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        off += static_cast<std::size_t>(layer_sizes_[l]) *
                   static_cast<std::size_t>(layer_sizes_[l + 1]) +
               static_cast<std::size_t>(layer_sizes_[l + 1]);
    }
    return off;
}

std::size_t Mlp::bias_offset(std::size_t layer) const {
    return weight_offset(layer) + static_cast<std::size_t>(layer_sizes_[layer]) *
                                      static_cast<std::size_t>(layer_sizes_[layer + 1]);
}

std::vector<double> Mlp::forward(const std::vector<double> &x) const {
    std::vector<double> act(x);
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        const std::size_t in = static_cast<std::size_t>(layer_sizes_[l]);
        const std::size_t out = static_cast<std::size_t>(layer_sizes_[l + 1]);
        const std::size_t w0 = weight_offset(l);
        const std::size_t b0 = bias_offset(l);
        std::vector<double> next(out);
        for (std::size_t j = 0; j < out; ++j) {
            double z = params_[b0 + j];
            for (std::size_t i = 0; i < in; ++i) z += params_[w0 + i * out + j] * act[i];
            next[j] = (l + 2 < layer_sizes_.size()) ? std::tanh(z) : z;
        }
        act = std::move(next);
    }
    return act;
}

double Mlp::loss(const std::vector<std::vector<double>> &X,
                 const std::vector<std::vector<double>> &Y,
                 const std::vector<std::size_t> &batch) const {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r : batch) {
        const auto out = forward(X[r]);
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double e = out[k] - Y[r][k];
            total += e * e;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

std::vector<double> Mlp::gradient(const std::vector<std::vector<double>> &X,
                                  const std::vector<std::vector<double>> &Y,
                                  const std::vector<std::size_t> &batch) const {
    std::vector<double> grad(params_.size(), 0.0);
    const std::size_t n_layers = layer_sizes_.size() - 1;
    const std::size_t n_out_total =
        batch.size() * static_cast<std::size_t>(layer_sizes_.back());

    for (std::size_t r : batch) {
        // forward pass, keeping activations
        std::vector<std::vector<double>> acts;
        acts.push_back(X[r]);
        for (std::size_t l = 0; l < n_layers; ++l) {
            const std::size_t in = static_cast<std::size_t>(layer_sizes_[l]);
            const std::size_t out = static_cast<std::size_t>(layer_sizes_[l + 1]);
            const std::size_t w0 = weight_offset(l);
            const std::size_t b0 = bias_offset(l);
            std::vector<double> next(out);
            for (std::size_t j = 0; j < out; ++j) {
                double z = params_[b0 + j];
                for (std::size_t i = 0; i < in; ++i) z += params_[w0 + i * out + j] * acts[l][i];
                next[j] = (l + 1 < n_layers) ? std::tanh(z) : z;
            }
            acts.push_back(std::move(next));
        }

        // d(MSE)/d(output) = 2 * err / n_out_total
        std::vector<double> delta(acts.back().size());
        for (std::size_t k = 0; k < delta.size(); ++k) {
            delta[k] = 2.0 * (acts.back()[k] - Y[r][k]) / static_cast<double>(n_out_total);
        }

        for (std::size_t l = n_layers; l-- > 0;) {
            const std::size_t in = static_cast<std::size_t>(layer_sizes_[l]);
            const std::size_t out = static_cast<std::size_t>(layer_sizes_[l + 1]);
            const std::size_t w0 = weight_offset(l);
            const std::size_t b0 = bias_offset(l);
            for (std::size_t j = 0; j < out; ++j) {
                grad[b0 + j] += delta[j];
                for (std::size_t i = 0; i < in; ++i) {
                    grad[w0 + i * out + j] += delta[j] * acts[l][i];
                }
            }
            if (l == 0) break;
            std::vector<double> prev(in, 0.0);
            for (std::size_t i = 0; i < in; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < out; ++j) s += params_[w0 + i * out + j] * delta[j];
                // tanh'(z) = 1 - a^2 with a the stored activation
                prev[i] = s * (1.0 - acts[l][i] * acts[l][i]);
            }
            delta = std::move(prev);
        }
    }
    return grad;
}

double Mlp::train_step(const std::vector<std::vector<double>> &X,
                       const std::vector<std::vector<double>> &Y,
                       const std::vector<std::size_t> &batch, double learning_rate) {
    const double before = loss(X, Y, batch);
    if (!std::isfinite(before)) throw NumericalError("non-finite MLP training loss");
    const auto grad = gradient(X, Y, batch);
    for (std::size_t p = 0; p < params_.size(); ++p) params_[p] -= learning_rate * grad[p];
    return before;
}

nlohmann::json Mlp::save() const {
    return {{"layers", layer_sizes_}, {"params", params_}};
}

Mlp Mlp::load(const nlohmann::json &j) {
    Mlp m;
    m.layer_sizes_ = j.at("layers").get<std::vector<int>>();
    m.params_ = j.at("params").get<std::vector<double>>();
    return m;
}

}  // namespace chronoml
