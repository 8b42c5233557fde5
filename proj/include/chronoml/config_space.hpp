#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chronoml/rng.hpp"

namespace chronoml {

using ParamValue = std::variant<double, long long, std::string>;

struct Domain {
    enum class Type { Float, Int, Categorical };
    Type type = Type::Float;
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;
    std::vector<std::string> choices;

    static Domain real(double lo, double hi, bool log_scale = false);
    static Domain integer(long long lo, long long hi, bool log_scale = false);
    static Domain categorical(std::vector<std::string> choices);
};

// Activation predicate: the parameter is active iff its parent parameter is
// active and assigned `value`.
struct Condition {
    std::string parent;
    std::string value;
};

struct HyperParam {
    std::string name;
    Domain domain;
    std::optional<Condition> condition;
};

// A point in the space: exactly the active parameters, each within domain.
struct Configuration {
    std::map<std::string, ParamValue> values;

    bool has(const std::string &name) const { return values.count(name) > 0; }
    double get_double(const std::string &name) const;
    long long get_int(const std::string &name) const;
    const std::string &get_cat(const std::string &name) const;

    bool operator==(const Configuration &) const = default;
    bool operator<(const Configuration &other) const { return values < other.values; }

    nlohmann::json to_json() const;
    static Configuration from_json(const nlohmann::json &j);
};

// Conditional search space. Parameters are kept in insertion order, which must
// be topological: a condition may only reference an earlier parameter.
class ConfigSpace {
public:
    void add(HyperParam param);

    const std::vector<HyperParam> &params() const { return params_; }
    std::size_t dimension() const { return params_.size(); }
    std::size_t index_of(const std::string &name) const;
    const HyperParam &param(const std::string &name) const;

    // Name set active under the given (complete or partial) assignments.
    std::vector<std::size_t> active_indices(const std::map<std::string, ParamValue> &values) const;

    void validate(const Configuration &config) const;

    // Selectors uniform, then active numerics uniform (log-uniform on log
    // domains), categoricals uniform.
    Configuration sample(Rng &rng) const;

    // Mid-range numerics (geometric midpoint on log domains), first categorical
    // choice, with the given root selector values pinned.
    Configuration default_config(const std::map<std::string, ParamValue> &pinned) const;

    // Fixed-dimension numeric encoding: active numerics min-max normalized to
    // [0,1] (log first where applicable), categoricals as ordinal codes scaled
    // to [0,1], inactive slots -1.
    std::vector<double> encode(const Configuration &config) const;
    Configuration decode(const std::vector<double> &x) const;

    // One-parameter mutation; selector mutations resample newly activated
    // children and drop deactivated ones.
    Configuration neighbor(const Configuration &config, Rng &rng) const;
    std::vector<Configuration> neighbors(const Configuration &config, int k, Rng &rng) const;

    double normalize(std::size_t idx, const ParamValue &v) const;
    ParamValue denormalize(std::size_t idx, double u) const;

    nlohmann::json to_json() const;
    static ConfigSpace from_json(const nlohmann::json &j);
    // Stable fingerprint of the schema, stored in persisted artifacts.
    std::string version() const;

private:
    std::vector<HyperParam> params_;
    std::map<std::string, std::size_t> index_;

    ParamValue sample_value(std::size_t idx, Rng &rng) const;
    ParamValue default_value(std::size_t idx) const;
};

// The forecasting search space: a root template selector over
// {statistical, ml, dnn} with per-template algorithm selectors and
// hyperparameters.
ConfigSpace make_forecast_space();

}  // namespace chronoml
