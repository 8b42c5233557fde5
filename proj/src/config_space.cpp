#include "chronoml/config_space.hpp"

#include <algorithm>
#include <cmath>

#include "chronoml/errors.hpp"

namespace chronoml {

Domain Domain::real(double lo, double hi, bool log_scale) {
    if (!(lo < hi)) throw ConfigError("float domain requires lo < hi");
    if (log_scale && lo <= 0.0) throw ConfigError("log domain requires lo > 0");
    Domain d;
    d.type = Type::Float;
    d.lo = lo;
    d.hi = hi;
    d.log_scale = log_scale;
    return d;
}

Domain Domain::integer(long long lo, long long hi, bool log_scale) {
    if (!(lo < hi)) throw ConfigError("int domain requires lo < hi");
    if (log_scale && lo <= 0) throw ConfigError("log domain requires lo > 0");
    Domain d;
    d.type = Type::Int;
    d.lo = static_cast<double>(lo);
    d.hi = static_cast<double>(hi);
    d.log_scale = log_scale;
    return d;
}

Domain Domain::categorical(std::vector<std::string> choices) {
    if (choices.empty()) throw ConfigError("categorical domain requires choices");
    Domain d;
    d.type = Type::Categorical;
    d.choices = std::move(choices);
    return d;
}

double Configuration::get_double(const std::string &name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw ConfigError("missing parameter '" + name + "'");
    if (const auto *d = std::get_if<double>(&it->second)) return *d;
    if (const auto *i = std::get_if<long long>(&it->second)) return static_cast<double>(*i);
    throw ConfigError("parameter '" + name + "' is not numeric");
}

long long Configuration::get_int(const std::string &name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw ConfigError("missing parameter '" + name + "'");
    if (const auto *i = std::get_if<long long>(&it->second)) return *i;
    throw ConfigError("parameter '" + name + "' is not an integer");
}

const std::string &Configuration::get_cat(const std::string &name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw ConfigError("missing parameter '" + name + "'");
    if (const auto *s = std::get_if<std::string>(&it->second)) return *s;
    throw ConfigError("parameter '" + name + "' is not categorical");
}

nlohmann::json Configuration::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[name, v] : values) {
        if (const auto *d = std::get_if<double>(&v)) {
            j[name] = *d;
        } else if (const auto *i = std::get_if<long long>(&v)) {
            j[name] = *i;
        } else {
            j[name] = std::get<std::string>(v);
        }
    }
    return j;
}

Configuration Configuration::from_json(const nlohmann::json &j) {
    Configuration c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_string()) {
            c.values[it.key()] = it->get<std::string>();
        } else if (it->is_number_integer()) {
            c.values[it.key()] = it->get<long long>();
        } else {
            c.values[it.key()] = it->get<double>();
        }
    }
    return c;
}

void ConfigSpace::add(HyperParam param) {
    if (index_.count(param.name)) throw ConfigError("duplicate parameter '" + param.name + "'");
    if (param.condition) {
        const auto it = index_.find(param.condition->parent);
        if (it == index_.end()) {
            throw ConfigError("condition parent '" + param.condition->parent +
                              "' must be declared before '" + param.name + "'");
        }
        const auto &parent = params_[it->second];
        if (parent.domain.type != Domain::Type::Categorical) {
            throw ConfigError("condition parent '" + param.condition->parent +
                              "' must be categorical");
        }
        if (std::find(parent.domain.choices.begin(), parent.domain.choices.end(),
                      param.condition->value) == parent.domain.choices.end()) {
            throw ConfigError("condition value '" + param.condition->value +
                              "' is not a choice of '" + param.condition->parent + "'");
        }
    }
    index_[param.name] = params_.size();
    params_.push_back(std::move(param));
}

std::size_t ConfigSpace::index_of(const std::string &name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

const HyperParam &ConfigSpace::param(const std::string &name) const {
    return params_[index_of(name)];
}

std::vector<std::size_t> ConfigSpace::active_indices(
    const std::map<std::string, ParamValue> &values) const {
    std::vector<std::size_t> active;
    std::vector<bool> is_active(params_.size(), false);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto &p = params_[i];
        if (!p.condition) {
            is_active[i] = true;
        } else {
            const std::size_t parent = index_.at(p.condition->parent);
            if (is_active[parent]) {
                const auto it = values.find(p.condition->parent);
                is_active[i] = it != values.end() &&
                               std::holds_alternative<std::string>(it->second) &&
                               std::get<std::string>(it->second) == p.condition->value;
            }
        }
        if (is_active[i]) active.push_back(i);
    }
    return active;
}

void ConfigSpace::validate(const Configuration &config) const {
    const auto active = active_indices(config.values);
    if (active.size() != config.values.size()) {
        throw ConfigError("configuration has " + std::to_string(config.values.size()) +
                          " assignments but " + std::to_string(active.size()) +
                          " active parameters");
    }
    for (std::size_t i : active) {
        const auto &p = params_[i];
        const auto it = config.values.find(p.name);
        if (it == config.values.end()) {
            throw ConfigError("active parameter '" + p.name + "' is unassigned");
        }
        const ParamValue &v = it->second;
        switch (p.domain.type) {
            case Domain::Type::Float: {
                if (!std::holds_alternative<double>(v)) {
                    throw ConfigError("parameter '" + p.name + "' must be a float");
                }
                const double d = std::get<double>(v);
                if (d < p.domain.lo || d > p.domain.hi) {
                    throw ConfigError("parameter '" + p.name + "' value " + std::to_string(d) +
                                      " outside domain");
                }
                break;
            }
            case Domain::Type::Int: {
                if (!std::holds_alternative<long long>(v)) {
                    throw ConfigError("parameter '" + p.name + "' must be an int");
                }
                const long long d = std::get<long long>(v);
                if (d < static_cast<long long>(p.domain.lo) ||
                    d > static_cast<long long>(p.domain.hi)) {
                    throw ConfigError("parameter '" + p.name + "' value " + std::to_string(d) +
                                      " outside domain");
                }
                break;
            }
            case Domain::Type::Categorical: {
                if (!std::holds_alternative<std::string>(v)) {
                    throw ConfigError("parameter '" + p.name + "' must be categorical");
                }
                const auto &s = std::get<std::string>(v);
                if (std::find(p.domain.choices.begin(), p.domain.choices.end(), s) ==
                    p.domain.choices.end()) {
                    throw ConfigError("parameter '" + p.name + "' has unknown choice '" + s + "'");
                }
                break;
            }
        }
    }
}

ParamValue ConfigSpace::sample_value(std::size_t idx, Rng &rng) const {
    const Domain &d = params_[idx].domain;
    switch (d.type) {
        case Domain::Type::Float:
            if (d.log_scale) {
                return std::exp(uniform_real(rng, std::log(d.lo), std::log(d.hi)));
            }
            return uniform_real(rng, d.lo, d.hi);
        case Domain::Type::Int: {
            if (d.log_scale) {
                const double v = std::exp(uniform_real(rng, std::log(d.lo), std::log(d.hi)));
                const long long r = std::llround(v);
                return std::clamp(r, static_cast<long long>(d.lo), static_cast<long long>(d.hi));
            }
            return uniform_int(rng, static_cast<long long>(d.lo), static_cast<long long>(d.hi));
        }
        case Domain::Type::Categorical: {
            const auto i = uniform_int(rng, 0, static_cast<long long>(d.choices.size()) - 1);
            return d.choices[static_cast<std::size_t>(i)];
        }
    }
    throw ConfigError("unreachable");
}

ParamValue ConfigSpace::default_value(std::size_t idx) const {
    const Domain &d = params_[idx].domain;
    switch (d.type) {
        case Domain::Type::Float:
            if (d.log_scale) return std::exp(0.5 * (std::log(d.lo) + std::log(d.hi)));
            return 0.5 * (d.lo + d.hi);
        case Domain::Type::Int: {
            double mid = d.log_scale ? std::exp(0.5 * (std::log(d.lo) + std::log(d.hi)))
                                     : 0.5 * (d.lo + d.hi);
            const long long r = std::llround(mid);
            return std::clamp(r, static_cast<long long>(d.lo), static_cast<long long>(d.hi));
        }
        case Domain::Type::Categorical:
            return d.choices.front();
    }
    throw ConfigError("unreachable");
}

Configuration ConfigSpace::sample(Rng &rng) const {
    Configuration c;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto &p = params_[i];
        bool active = true;
        if (p.condition) {
            const auto it = c.values.find(p.condition->parent);
            active = it != c.values.end() &&
                     std::get<std::string>(it->second) == p.condition->value;
        }
        if (active) c.values[p.name] = sample_value(i, rng);
    }
    return c;
}

Configuration ConfigSpace::default_config(
    const std::map<std::string, ParamValue> &pinned) const {
    Configuration c;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto &p = params_[i];
        bool active = true;
        if (p.condition) {
            const auto it = c.values.find(p.condition->parent);
            active = it != c.values.end() &&
                     std::get<std::string>(it->second) == p.condition->value;
        }
        if (!active) continue;
        const auto pin = pinned.find(p.name);
        c.values[p.name] = pin != pinned.end() ? pin->second : default_value(i);
    }
    validate(c);
    return c;
}

double ConfigSpace::normalize(std::size_t idx, const ParamValue &v) const {
    const Domain &d = params_[idx].domain;
    switch (d.type) {
        case Domain::Type::Float:
        case Domain::Type::Int: {
            double x = std::holds_alternative<double>(v)
                           ? std::get<double>(v)
                           : static_cast<double>(std::get<long long>(v));
            if (d.log_scale) {
                return (std::log(x) - std::log(d.lo)) / (std::log(d.hi) - std::log(d.lo));
            }
            return (x - d.lo) / (d.hi - d.lo);
        }
        case Domain::Type::Categorical: {
            const auto &s = std::get<std::string>(v);
            const auto it = std::find(d.choices.begin(), d.choices.end(), s);
            if (it == d.choices.end()) {
                throw ConfigError("unknown choice '" + s + "' for '" + params_[idx].name + "'");
            }
            if (d.choices.size() == 1) return 0.0;
            return static_cast<double>(it - d.choices.begin()) /
                   static_cast<double>(d.choices.size() - 1);
        }
    }
    throw ConfigError("unreachable");
}

ParamValue ConfigSpace::denormalize(std::size_t idx, double u) const {
    const Domain &d = params_[idx].domain;
    u = std::clamp(u, 0.0, 1.0);
    switch (d.type) {
        case Domain::Type::Float:
            if (d.log_scale) {
                return std::exp(std::log(d.lo) + u * (std::log(d.hi) - std::log(d.lo)));
            }
            return d.lo + u * (d.hi - d.lo);
        case Domain::Type::Int: {
            double x = d.log_scale
                           ? std::exp(std::log(d.lo) + u * (std::log(d.hi) - std::log(d.lo)))
                           : d.lo + u * (d.hi - d.lo);
            return std::clamp(static_cast<long long>(std::llround(x)),
                              static_cast<long long>(d.lo), static_cast<long long>(d.hi));
        }
        case Domain::Type::Categorical: {
            const auto k = static_cast<std::size_t>(
                std::llround(u * static_cast<double>(d.choices.size() - 1)));
            return d.choices[std::min(k, d.choices.size() - 1)];
        }
    }
    throw ConfigError("unreachable");
}

std::vector<double> ConfigSpace::encode(const Configuration &config) const {
    std::vector<double> x(params_.size(), -1.0);
    for (const auto &[name, v] : config.values) {
        const auto it = index_.find(name);
        if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
        x[it->second] = normalize(it->second, v);
    }
    return x;
}

Configuration ConfigSpace::decode(const std::vector<double> &x) const {
    if (x.size() != params_.size()) throw ConfigError("encoded vector has wrong dimension");
    Configuration c;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto &p = params_[i];
        bool active = true;
        if (p.condition) {
            const auto it = c.values.find(p.condition->parent);
            active = it != c.values.end() &&
                     std::get<std::string>(it->second) == p.condition->value;
        }
        if (active) c.values[p.name] = denormalize(i, x[i]);
    }
    return c;
}

Configuration ConfigSpace::neighbor(const Configuration &config, Rng &rng) const {
    const auto active = active_indices(config.values);
    const std::size_t pick = active[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<long long>(active.size()) - 1))];
    const auto &p = params_[pick];

    std::map<std::string, ParamValue> mutated = config.values;
    switch (p.domain.type) {
        case Domain::Type::Float:
        case Domain::Type::Int: {
            const double u = normalize(pick, config.values.at(p.name));
            const double step = 0.2 * normal(rng);
            mutated[p.name] = denormalize(pick, std::clamp(u + step, 0.0, 1.0));
            break;
        }
        case Domain::Type::Categorical: {
            if (p.domain.choices.size() > 1) {
                const auto &cur = std::get<std::string>(config.values.at(p.name));
                std::vector<std::string> others;
                for (const auto &c : p.domain.choices) {
                    if (c != cur) others.push_back(c);
                }
                mutated[p.name] = others[static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<long long>(others.size()) - 1))];
            }
            break;
        }
    }

    // Rebuild: keep surviving assignments, sample newly activated children,
    // drop deactivated ones.
    Configuration result;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto &q = params_[i];
        bool active_now = true;
        if (q.condition) {
            const auto it = result.values.find(q.condition->parent);
            active_now = it != result.values.end() &&
                         std::get<std::string>(it->second) == q.condition->value;
        }
        if (!active_now) continue;
        const auto it = mutated.find(q.name);
        result.values[q.name] = it != mutated.end() ? it->second : sample_value(i, rng);
    }
    return result;
}

std::vector<Configuration> ConfigSpace::neighbors(const Configuration &config, int k,
                                                  Rng &rng) const {
    std::vector<Configuration> out;
    for (int i = 0; i < k; ++i) out.push_back(neighbor(config, rng));
    return out;
}

nlohmann::json ConfigSpace::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &p : params_) {
        nlohmann::json j;
        j["name"] = p.name;
        switch (p.domain.type) {
            case Domain::Type::Float: j["type"] = "float"; break;
            case Domain::Type::Int: j["type"] = "int"; break;
            case Domain::Type::Categorical: j["type"] = "categorical"; break;
        }
        if (p.domain.type == Domain::Type::Categorical) {
            j["choices"] = p.domain.choices;
        } else {
            j["lo"] = p.domain.lo;
            j["hi"] = p.domain.hi;
            j["log"] = p.domain.log_scale;
        }
        if (p.condition) {
            j["condition"] = {{"parent", p.condition->parent}, {"value", p.condition->value}};
        }
        arr.push_back(std::move(j));
    }
    return {{"params", arr}};
}

ConfigSpace ConfigSpace::from_json(const nlohmann::json &j) {
    ConfigSpace space;
    for (const auto &e : j.at("params")) {
        HyperParam p;
        p.name = e.at("name").get<std::string>();
        const std::string type = e.at("type").get<std::string>();
        if (type == "categorical") {
            p.domain = Domain::categorical(e.at("choices").get<std::vector<std::string>>());
        } else if (type == "float") {
            p.domain = Domain::real(e.at("lo").get<double>(), e.at("hi").get<double>(),
                                    e.value("log", false));
        } else {
            p.domain = Domain::integer(static_cast<long long>(e.at("lo").get<double>()),
                                       static_cast<long long>(e.at("hi").get<double>()),
                                       e.value("log", false));
        }
        if (e.contains("condition")) {
            p.condition = Condition{e.at("condition").at("parent").get<std::string>(),
                                    e.at("condition").at("value").get<std::string>()};
        }
        space.add(std::move(p));
    }
    return space;
}

std::string ConfigSpace::version() const {
    // FNV-1a over the schema dump; stable across platforms.
    const std::string dump = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "cs1-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ConfigSpace make_forecast_space() {
    ConfigSpace s;
    const auto cond = [](const std::string &parent, const std::string &value) {
        return std::optional<Condition>(Condition{parent, value});
    };

    s.add({"template", Domain::categorical({"statistical", "ml", "dnn"}), std::nullopt});

    // statistical template: optional imputation/detrending/deseasonalizing in
    // front of a per-series model
    s.add({"stat.use_imputer", Domain::categorical({"off", "on"}), cond("template", "statistical")});
    s.add({"stat.imputer_strategy", Domain::categorical({"forward_fill", "mean", "zero"}),
           cond("stat.use_imputer", "on")});
    s.add({"stat.detrend", Domain::categorical({"off", "const", "linear"}),
           cond("template", "statistical")});
    s.add({"stat.deseasonalize", Domain::categorical({"off", "on"}),
           cond("template", "statistical")});
    s.add({"stat.algorithm",
           Domain::categorical({"naive", "snaive", "drift", "ses", "holt", "holt_winters", "ar"}),
           cond("template", "statistical")});
    s.add({"stat.ses.mode", Domain::categorical({"optimize", "manual"}),
           cond("stat.algorithm", "ses")});
    s.add({"stat.ses.alpha", Domain::real(0.01, 0.99), cond("stat.ses.mode", "manual")});
    s.add({"stat.holt.mode", Domain::categorical({"optimize", "manual"}),
           cond("stat.algorithm", "holt")});
    s.add({"stat.holt.alpha", Domain::real(0.01, 0.99), cond("stat.holt.mode", "manual")});
    s.add({"stat.holt.beta", Domain::real(0.01, 0.99), cond("stat.holt.mode", "manual")});
    s.add({"stat.holt.damped", Domain::categorical({"no", "yes"}), cond("stat.algorithm", "holt")});
    s.add({"stat.holt.phi", Domain::real(0.80, 0.98), cond("stat.holt.damped", "yes")});
    s.add({"stat.hw.mode", Domain::categorical({"optimize", "manual"}),
           cond("stat.algorithm", "holt_winters")});
    s.add({"stat.hw.alpha", Domain::real(0.01, 0.99), cond("stat.hw.mode", "manual")});
    s.add({"stat.hw.beta", Domain::real(0.01, 0.99), cond("stat.hw.mode", "manual")});
    s.add({"stat.hw.gamma", Domain::real(0.01, 0.99), cond("stat.hw.mode", "manual")});
    s.add({"stat.ar.lags", Domain::integer(1, 16), cond("stat.algorithm", "ar")});

    // ml template: mandatory imputation, optional encoding/scaling, windowed
    // reduction to a tabular regressor
    s.add({"ml.imputer_strategy", Domain::categorical({"forward_fill", "mean", "zero"}),
           cond("template", "ml")});
    s.add({"ml.encode_categoricals", Domain::categorical({"on", "off"}), cond("template", "ml")});
    s.add({"ml.scaler", Domain::categorical({"none", "standard", "minmax"}),
           cond("template", "ml")});
    s.add({"ml.window", Domain::integer(2, 48), cond("template", "ml")});
    s.add({"ml.regressor", Domain::categorical({"ridge", "bagged_trees"}), cond("template", "ml")});
    s.add({"ml.ridge.lambda", Domain::real(1e-6, 1e2, true), cond("ml.regressor", "ridge")});
    s.add({"ml.trees.n", Domain::integer(10, 200, true), cond("ml.regressor", "bagged_trees")});
    s.add({"ml.trees.depth", Domain::integer(2, 16), cond("ml.regressor", "bagged_trees")});

    // dnn template: mandatory imputation and scaling, windowed reduction to a
    // small feedforward network
    s.add({"dnn.imputer_strategy", Domain::categorical({"forward_fill", "mean", "zero"}),
           cond("template", "dnn")});
    s.add({"dnn.scaler", Domain::categorical({"standard", "minmax"}), cond("template", "dnn")});
    s.add({"dnn.window", Domain::integer(2, 48), cond("template", "dnn")});
    s.add({"dnn.hidden", Domain::integer(4, 64, true), cond("template", "dnn")});
    s.add({"dnn.layers", Domain::integer(1, 3), cond("template", "dnn")});
    s.add({"dnn.learning_rate", Domain::real(1e-4, 0.5, true), cond("template", "dnn")});
    s.add({"dnn.epochs", Domain::integer(16, 256, true), cond("template", "dnn")});
    s.add({"dnn.batch", Domain::integer(8, 128, true), cond("template", "dnn")});

    return s;
}

}  // namespace chronoml
