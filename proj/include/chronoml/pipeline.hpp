#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "chronoml/config_space.hpp"
#include "chronoml/forecasters.hpp"
#include "chronoml/transforms.hpp"

namespace chronoml {

// A template instance: preprocessing chain plus a forecaster, built from a
// configuration. Transforms fit on training data only; forecasts come back on
// the original scale.
class Pipeline {
public:
    Pipeline() = default;
    explicit Pipeline(const Configuration &config) : config_(config) {}

    const Configuration &config() const { return config_; }

    void fit(const PanelDataset &train, const FitContext &ctx);
    Forecasts forecast(int horizon) const;

    nlohmann::json save() const;
    static Pipeline load(const nlohmann::json &j);

private:
    Configuration config_;
    std::vector<FittedTransform> transforms_;
    std::unique_ptr<Forecaster> forecaster_;

    static std::vector<TransformSpec> transform_specs(const Configuration &config,
                                                      int seasonal_period);
    static ForecasterSpec forecaster_spec(const Configuration &config);
};

}  // namespace chronoml
