#include "chronoml/metalearn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "chronoml/errors.hpp"

namespace chronoml {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

constexpr double kBandwidthFloor = 0.01;

}  // namespace

double dtw(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.empty() || b.empty()) throw Error("dtw requires non-empty sequences");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf);
    std::vector<double> cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double dataset_distance(const PanelDataset &e, const PanelDataset &f, int h) {
    if (e.series.empty() || f.series.empty()) throw Error("dataset_distance needs non-empty datasets");
    std::vector<std::vector<double>> et, ft;
    for (const auto &s : e.series) et.push_back(normalized_tail(s, h));
    for (const auto &s : f.series) ft.push_back(normalized_tail(s, h));
    double total = 0.0;
    for (const auto &a : et) {
        for (const auto &b : ft) total += dtw(a, b);
    }
    return total / static_cast<double>(et.size() * ft.size());
}

std::vector<double> distance_weights(const std::vector<double> &distances) {
    if (distances.empty()) return {};
    const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
    if (*hi == *lo) return std::vector<double>(distances.size(), 1.0);
    std::vector<double> w;
    w.reserve(distances.size());
    for (double d : distances) w.push_back(1.0 - (d - *lo) / (*hi - *lo));
    return w;
}

nlohmann::json MetaKnowledgeBase::to_json() const {
    nlohmann::json j;
    j["space_version"] = space_version;
    j["entries"] = nlohmann::json::array();
    for (const auto &e : entries) {
        nlohmann::json je;
        je["name"] = e.name;
        je["tails"] = e.tails;
        je["configs"] = nlohmann::json::array();
        for (const auto &c : e.configs) {
            je["configs"].push_back({{"assignments", c.config.to_json()}, {"loss", c.loss}});
        }
        j["entries"].push_back(std::move(je));
    }
    return j;
}

MetaKnowledgeBase MetaKnowledgeBase::from_json(const nlohmann::json &j) {
    MetaKnowledgeBase kb;
    kb.space_version = j.at("space_version").get<std::string>();
    for (const auto &je : j.at("entries")) {
        KbEntry e;
        e.name = je.at("name").get<std::string>();
        e.tails = je.at("tails").get<std::vector<std::vector<double>>>();
        for (const auto &jc : je.at("configs")) {
            e.configs.push_back(
                {Configuration::from_json(jc.at("assignments")), jc.at("loss").get<double>()});
        }
        kb.entries.push_back(std::move(e));
    }
    return kb;
}

void MetaKnowledgeBase::save(const std::string &path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write knowledge base: " + path);
    out << to_json().dump(2) << "\n";
}

MetaKnowledgeBase MetaKnowledgeBase::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open knowledge base: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception &e) {
        throw ParseError("malformed knowledge base (" + path + "): " + e.what());
    }
    return from_json(j);
}

void MetaKnowledgeBase::merge(const MetaKnowledgeBase &other, std::size_t n_c) {
    if (!other.space_version.empty() && !space_version.empty() &&
        other.space_version != space_version) {
        throw SchemaError("knowledge base space_version mismatch: " + space_version + " vs " +
                          other.space_version);
    }
    if (space_version.empty()) space_version = other.space_version;
    for (const auto &oe : other.entries) {
        KbEntry *mine = nullptr;
        for (auto &e : entries) {
            if (e.name == oe.name) {
                mine = &e;
                break;
            }
        }
        if (!mine) {
            entries.push_back(oe);
            mine = &entries.back();
        } else {
            for (const auto &c : oe.configs) {
                const bool dup = std::any_of(
                    mine->configs.begin(), mine->configs.end(), [&](const KbConfig &k) {
                        return k.config == c.config && k.loss == c.loss;
                    });
                if (!dup) mine->configs.push_back(c);
            }
            if (mine->tails.empty()) mine->tails = oe.tails;
        }
        std::stable_sort(mine->configs.begin(), mine->configs.end(),
                         [](const KbConfig &a, const KbConfig &b) { return a.loss < b.loss; });
        if (mine->configs.size() > n_c) mine->configs.resize(n_c);
    }
}

PriorModel PriorModel::build(const MetaKnowledgeBase &kb, const PanelDataset &new_dataset,
                             const ConfigSpace &space, std::size_t n_d, int h) {
    if (kb.entries.empty()) throw Error("knowledge base has no entries");
    PriorModel prior;
    prior.space_ = &space;

    std::vector<std::vector<double>> new_tails;
    for (const auto &s : new_dataset.series) new_tails.push_back(normalized_tail(s, h));

    std::vector<double> distances;
    for (const auto &e : kb.entries) {
        if (e.tails.empty()) throw Error("knowledge base entry '" + e.name + "' has no tails");
        double total = 0.0;
        for (const auto &a : e.tails) {
            for (const auto &b : new_tails) total += dtw(a, b);
        }
        distances.push_back(total / static_cast<double>(e.tails.size() * new_tails.size()));
    }

    std::vector<std::size_t> order(kb.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
    order.resize(std::min(n_d, order.size()));

    std::vector<double> selected;
    for (std::size_t i : order) selected.push_back(distances[i]);
    prior.weights_ = distance_weights(selected);

    // Pool configurations with their source-dataset weight.
    struct WeightedConfig {
        const Configuration *config;
        double weight;
    };
    std::vector<WeightedConfig> pool;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        for (const auto &kc : kb.entries[order[rank]].configs) {
            pool.push_back({&kc.config, prior.weights_[rank]});
        }
    }
    if (pool.empty()) throw Error("selected knowledge base entries hold no configurations");

    for (std::size_t idx = 0; idx < space.params().size(); ++idx) {
        const auto &p = space.params()[idx];
        if (p.domain.type == Domain::Type::Categorical) {
            std::vector<double> counts(p.domain.choices.size(), 0.0);
            double total = 0.0;
            bool observed = false;
            for (const auto &wc : pool) {
                const auto it = wc.config->values.find(p.name);
                if (it == wc.config->values.end()) continue;
                observed = true;
                const auto &choice = std::get<std::string>(it->second);
                const auto pos =
                    std::find(p.domain.choices.begin(), p.domain.choices.end(), choice);
                if (pos == p.domain.choices.end()) continue;
                counts[static_cast<std::size_t>(pos - p.domain.choices.begin())] += wc.weight;
                total += wc.weight;
            }
            if (!observed) continue;  // uniform fallback at evaluation time
            CatPrior cp;
            const double k = static_cast<double>(counts.size());
            for (double c : counts) {
                cp.masses.push_back((c + kCategoricalFloor) / (total + k * kCategoricalFloor));
            }
            prior.categorical_[p.name] = std::move(cp);
        } else {
            NumericPrior np;
            for (const auto &wc : pool) {
                const auto it = wc.config->values.find(p.name);
                if (it == wc.config->values.end()) continue;
                np.locs.push_back(space.normalize(idx, it->second));
                np.weights.push_back(wc.weight);
            }
            const double wsum = std::accumulate(np.weights.begin(), np.weights.end(), 0.0);
            if (np.locs.empty() || wsum <= 0.0) continue;  // uniform fallback
            // Silverman's rule on the weighted sample
            double mean = 0.0;
            for (std::size_t i = 0; i < np.locs.size(); ++i) mean += np.weights[i] * np.locs[i];
            mean /= wsum;
            double var = 0.0;
            double wsq = 0.0;
            for (std::size_t i = 0; i < np.locs.size(); ++i) {
                var += np.weights[i] * (np.locs[i] - mean) * (np.locs[i] - mean);
                wsq += np.weights[i] * np.weights[i];
            }
            var /= wsum;
            const double n_eff = wsum * wsum / wsq;
            np.bandwidth = 1.06 * std::sqrt(var) * std::pow(n_eff, -0.2);
            np.bandwidth = std::max(np.bandwidth, kBandwidthFloor);
            prior.numeric_[p.name] = std::move(np);
        }
    }
    return prior;
}

double PriorModel::numeric_density(const std::string &param, double u) const {
    const auto it = numeric_.find(param);
    if (it == numeric_.end()) return 1.0;  // uniform over [0,1]
    const NumericPrior &np = it->second;
    const double h = np.bandwidth;
    double wsum = 0.0;
    double density = 0.0;
    for (std::size_t i = 0; i < np.locs.size(); ++i) {
        const double w = np.weights[i];
        if (w <= 0.0) continue;
        // component truncated to [0,1] and renormalized
        const double z_mass = normal_cdf((1.0 - np.locs[i]) / h) - normal_cdf((0.0 - np.locs[i]) / h);
        if (z_mass <= 0.0) continue;
        density += w * normal_pdf((u - np.locs[i]) / h) / (h * z_mass);
        wsum += w;
    }
    if (wsum <= 0.0) return 1.0;
    return density / wsum;
}

double PriorModel::categorical_mass(const std::string &param, const std::string &choice) const {
    const auto &p = space_->param(param);
    const auto it = categorical_.find(param);
    if (it == categorical_.end()) {
        return 1.0 / static_cast<double>(p.domain.choices.size());
    }
    const auto pos = std::find(p.domain.choices.begin(), p.domain.choices.end(), choice);
    if (pos == p.domain.choices.end()) return 0.0;
    return it->second.masses[static_cast<std::size_t>(pos - p.domain.choices.begin())];
}

double PriorModel::density(const Configuration &config) const {
    double product = 1.0;
    for (const auto &[name, value] : config.values) {
        const std::size_t idx = space_->index_of(name);
        const auto &p = space_->params()[idx];
        if (p.domain.type == Domain::Type::Categorical) {
            product *= categorical_mass(name, std::get<std::string>(value));
        } else {
            product *= numeric_density(name, space_->normalize(idx, value));
        }
    }
    return product;
}

Configuration PriorModel::sample(Rng &rng) const {
    Configuration c;
    for (std::size_t i = 0; i < space_->params().size(); ++i) {
        const auto &p = space_->params()[i];
        bool active = true;
        if (p.condition) {
            const auto it = c.values.find(p.condition->parent);
            active = it != c.values.end() &&
                     std::get<std::string>(it->second) == p.condition->value;
        }
        if (!active) continue;
        if (p.domain.type == Domain::Type::Categorical) {
            const auto it = categorical_.find(p.name);
            if (it == categorical_.end()) {
                c.values[p.name] = p.domain.choices[static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<long long>(p.domain.choices.size()) - 1))];
            } else {
                double u = uniform01(rng);
                std::size_t k = 0;
                for (; k + 1 < it->second.masses.size(); ++k) {
                    u -= it->second.masses[k];
                    if (u <= 0.0) break;
                }
                c.values[p.name] = p.domain.choices[k];
            }
        } else {
            const auto it = numeric_.find(p.name);
            if (it == numeric_.end()) {
                c.values[p.name] = space_->denormalize(i, uniform01(rng));
            } else {
                const NumericPrior &np = it->second;
                const double wsum =
                    std::accumulate(np.weights.begin(), np.weights.end(), 0.0);
                double pick = uniform01(rng) * wsum;
                std::size_t comp = 0;
                for (; comp + 1 < np.locs.size(); ++comp) {
                    pick -= np.weights[comp];
                    if (pick <= 0.0) break;
                }
                double u = -1.0;
                for (int attempt = 0; attempt < 100; ++attempt) {
                    u = np.locs[comp] + np.bandwidth * normal(rng);
                    if (u >= 0.0 && u <= 1.0) break;
                }
                u = std::clamp(u, 0.0, 1.0);
                c.values[p.name] = space_->denormalize(i, u);
            }
        }
    }
    return c;
}

}  // namespace chronoml
