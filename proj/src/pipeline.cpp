#include "chronoml/pipeline.hpp"

#include "chronoml/errors.hpp"

namespace chronoml {

std::vector<TransformSpec> Pipeline::transform_specs(const Configuration &config,
                                                     int seasonal_period) {
    std::vector<TransformSpec> specs;
    const std::string &tmpl = config.get_cat("template");
    if (tmpl == "statistical") {
        if (config.get_cat("stat.use_imputer") == "on") {
            specs.push_back({TransformKind::Imputer, config.get_cat("stat.imputer_strategy")});
        }
        const std::string &detrend = config.get_cat("stat.detrend");
        if (detrend != "off") {
            TransformSpec t;
            t.kind = TransformKind::Detrender;
            t.degree = detrend == "linear" ? 1 : 0;
            specs.push_back(t);
        }
        if (config.get_cat("stat.deseasonalize") == "on") {
            TransformSpec t;
            t.kind = TransformKind::Deseasonalizer;
            t.period = seasonal_period;
            specs.push_back(t);
        }
    } else if (tmpl == "ml") {
        specs.push_back({TransformKind::Imputer, config.get_cat("ml.imputer_strategy")});
        if (config.get_cat("ml.encode_categoricals") == "on") {
            TransformSpec t;
            t.kind = TransformKind::OrdinalEncoder;
            specs.push_back(t);
        }
        const std::string &scaler = config.get_cat("ml.scaler");
        if (scaler != "none") {
            specs.push_back({TransformKind::Scaler, scaler});
        }
    } else if (tmpl == "dnn") {
        specs.push_back({TransformKind::Imputer, config.get_cat("dnn.imputer_strategy")});
        TransformSpec enc;
        enc.kind = TransformKind::OrdinalEncoder;
        specs.push_back(enc);
        specs.push_back({TransformKind::Scaler, config.get_cat("dnn.scaler")});
    } else {
        throw ConfigError("unknown template '" + tmpl + "'");
    }
    return specs;
}

ForecasterSpec Pipeline::forecaster_spec(const Configuration &config) {
    ForecasterSpec spec;
    const std::string &tmpl = config.get_cat("template");
    if (tmpl == "statistical") {
        spec.kind = config.get_cat("stat.algorithm");
        if (spec.kind == "ses" && config.get_cat("stat.ses.mode") == "manual") {
            spec.alpha = config.get_double("stat.ses.alpha");
        } else if (spec.kind == "holt") {
            spec.damped = config.get_cat("stat.holt.damped") == "yes";
            if (spec.damped) spec.phi = config.get_double("stat.holt.phi");
            if (config.get_cat("stat.holt.mode") == "manual") {
                spec.alpha = config.get_double("stat.holt.alpha");
                spec.beta = config.get_double("stat.holt.beta");
            }
        } else if (spec.kind == "holt_winters" && config.get_cat("stat.hw.mode") == "manual") {
            spec.alpha = config.get_double("stat.hw.alpha");
            spec.beta = config.get_double("stat.hw.beta");
            spec.gamma = config.get_double("stat.hw.gamma");
        } else if (spec.kind == "ar") {
            spec.lags = static_cast<int>(config.get_int("stat.ar.lags"));
        }
    } else if (tmpl == "ml") {
        spec.kind = config.get_cat("ml.regressor");
        spec.window = static_cast<int>(config.get_int("ml.window"));
        if (spec.kind == "ridge") {
            spec.ridge_lambda = config.get_double("ml.ridge.lambda");
        } else {
            spec.n_trees = static_cast<int>(config.get_int("ml.trees.n"));
            spec.max_depth = static_cast<int>(config.get_int("ml.trees.depth"));
        }
    } else {
        spec.kind = "mlp";
        spec.window = static_cast<int>(config.get_int("dnn.window"));
        spec.hidden = static_cast<int>(config.get_int("dnn.hidden"));
        spec.layers = static_cast<int>(config.get_int("dnn.layers"));
        spec.learning_rate = config.get_double("dnn.learning_rate");
        spec.epochs = static_cast<int>(config.get_int("dnn.epochs"));
        spec.batch = static_cast<int>(config.get_int("dnn.batch"));
    }
    return spec;
}

void Pipeline::fit(const PanelDataset &train, const FitContext &ctx) {
    transforms_.clear();
    PanelDataset working = train;
    for (const auto &spec : transform_specs(config_, ctx.seasonal_period)) {
        ctx.check_deadline();
        transforms_.push_back(FittedTransform::fit_transform(spec, working));
    }
    forecaster_ = make_forecaster(forecaster_spec(config_));
    forecaster_->fit(working, ctx);
}

Forecasts Pipeline::forecast(int horizon) const {
    if (!forecaster_) throw Error("pipeline predict before fit");
    Forecasts fc = forecaster_->predict(horizon);
    for (auto it = transforms_.rbegin(); it != transforms_.rend(); ++it) {
        for (std::size_t i = 0; i < fc.size(); ++i) {
            it->inverse_forecasts(i, fc[i]);
        }
    }
    for (const auto &series : fc) {
        for (const auto &row : series) {
            for (double v : row) {
                if (!std::isfinite(v)) throw NumericalError("non-finite forecast value");
            }
        }
    }
    return fc;
}

nlohmann::json Pipeline::save() const {
    nlohmann::json j;
    j["config"] = config_.to_json();
    j["transforms"] = nlohmann::json::array();
    for (const auto &t : transforms_) j["transforms"].push_back(t.save());
    j["forecaster"] = forecaster_ ? forecaster_->save() : nlohmann::json();
    return j;
}

Pipeline Pipeline::load(const nlohmann::json &j) {
    Pipeline p(Configuration::from_json(j.at("config")));
    for (const auto &t : j.at("transforms")) {
        p.transforms_.push_back(FittedTransform::load(t));
    }
    if (!j.at("forecaster").is_null()) {
        p.forecaster_ = load_forecaster(j.at("forecaster"));
    }
    return p;
}

}  // namespace chronoml
