#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronoml/engine.hpp"

namespace {

using namespace chronoml;

int resolve_workers(int flag_value) {
    // CHRONO_WORKERS overrides the flag/config value
    if (const char *env = std::getenv("CHRONO_WORKERS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            std::fprintf(stderr, "warning: ignoring malformed CHRONO_WORKERS='%s'\n", env);
        }
    }
    return flag_value;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"chrono - automated time series forecasting"};
    app.require_subcommand(1);

    // ------------------------------------------------------------------ fit
    auto *fit = app.add_subcommand("fit", "search pipelines and fit an ensemble");
    std::string data_csv, meta_path, kb_path, out_dir = "run";
    std::string metric = "mase", mode = "full";
    RunConfig cfg;
    fit->set_config("--config", "", "key=value file; command-line flags override");
    fit->add_option("--data", data_csv, "dataset CSV (long format)")->required();
    fit->add_option("--meta", meta_path, "dataset metadata JSON")->required();
    fit->add_option("--budget-s", cfg.time_budget_s, "optimization time budget in seconds");
    fit->add_option("--grace-s", cfg.grace_period_s, "grace period for in-flight trials");
    fit->add_option("--seed", cfg.seed, "random seed");
    fit->add_option("--metric", metric, "mase | smape | rmse");
    fit->add_option("--mode", mode, "templates_only | templates_mf | templates_ws | full");
    fit->add_option("--kb", kb_path, "meta-knowledge base for warm-starting");
    fit->add_option("--out", out_dir, "output directory");
    fit->add_option("--max-trials", cfg.max_trials, "cap on evaluated trials (0 = unlimited)");
    fit->add_option("--workers", cfg.workers, "worker threads (env CHRONO_WORKERS overrides)");
    fit->add_option("--beta", cfg.beta, "prior decay factor");
    fit->add_option("--n-d", cfg.n_d, "nearest datasets used for the prior");
    fit->add_option("--n-c", cfg.n_c, "configurations kept per dataset");
    fit->add_option("--h-tail", cfg.h_tail, "tail length for dataset similarity");
    fit->add_option("--eta", cfg.budget.eta, "successive-halving rate");
    fit->add_option("--b-min", cfg.budget.b_min, "minimum fidelity budget");
    fit->add_option("--l-min", cfg.budget.l_min, "fidelity deactivation length");
    fit->add_option("--ensemble-k", cfg.ensemble_k, "maximum ensemble size");
    fit->add_flag("--logical-time", cfg.logical_time,
                  "record zero wall times for byte-stable logs");

    // ------------------------------------------------------------- forecast
    auto *forecast = app.add_subcommand("forecast", "forecast with a fitted ensemble");
    std::string model_path, forecast_out;
    int horizon = 0;
    forecast->add_option("--model", model_path, "ensemble.json from a fit run")->required();
    forecast->add_option("--horizon", horizon, "steps ahead (default: the training horizon)");
    forecast->add_option("--out", forecast_out, "output JSON path (default: stdout)");

    // ------------------------------------------------------ benchmark
    auto *bench = app.add_subcommand("benchmark", "run a suite across engine modes");
    std::string suite_path, bench_out = "results";
    int seeds = 5;
    bench->add_option("--suite", suite_path, "suite JSON")->required();
    bench->add_option("--seeds", seeds, "seed repetitions per cell");
    bench->add_option("--out", bench_out, "output directory");

    // --------------------------------------------------- build-priors
    auto *priors = app.add_subcommand("build-priors", "merge run logs into a knowledge base");
    std::vector<std::string> run_dirs;
    std::string kb_out = "kb.json";
    std::size_t n_c = 10;
    int h_tail = 200;
    priors->add_option("--runs", run_dirs, "run directories")->required()->expected(-1);
    priors->add_option("--out", kb_out, "output knowledge base path");
    priors->add_option("--n-c", n_c, "configurations kept per dataset");
    priors->add_option("--h-tail", h_tail, "tail length stored per series");

    // ----------------------------------------------------------- synth
    auto *synth = app.add_subcommand("synth", "generate synthetic datasets");
    std::string kind = "trend_season", synth_out = "data", synth_name;
    TrendSeasonParams ts;
    ArProcessParams ar;
    PanelFamilyParams family;
    std::uint64_t synth_seed = 0;
    int synth_T = 300, synth_m = 12, synth_h = 12, family_count = 5, family_series = 3;
    double noise = 0.5, amplitude = 5.0, slope = 0.05, level = 10.0, phi1 = 0.8, phi2 = 0.0;
    synth->add_option("--kind", kind, "trend_season | ar_process | panel_family");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--name", synth_name, "dataset name (default: kind + seed)");
    synth->add_option("--t", synth_T, "series length");
    synth->add_option("--m", synth_m, "seasonal period");
    synth->add_option("--horizon", synth_h, "forecast horizon");
    synth->add_option("--noise", noise, "noise standard deviation");
    synth->add_option("--amplitude", amplitude, "seasonal amplitude");
    synth->add_option("--slope", slope, "trend slope");
    synth->add_option("--level", level, "base level");
    synth->add_option("--phi1", phi1, "AR(1) coefficient");
    synth->add_option("--phi2", phi2, "AR(2) coefficient");
    synth->add_option("--count", family_count, "datasets in a panel family");
    synth->add_option("--series", family_series, "series per family dataset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            cfg.metric = loss_kind_from_string(metric);
            cfg.mode = mode_from_string(mode);
            cfg.workers = resolve_workers(cfg.workers);
            cfg.data_csv = data_csv;
            cfg.meta_path = meta_path;
            const PanelDataset dataset = load_dataset(data_csv, meta_path);
            MetaKnowledgeBase kb;
            const bool have_kb = !kb_path.empty();
            if (have_kb) kb = MetaKnowledgeBase::load(kb_path);
            std::filesystem::create_directories(out_dir);
            RunResult result = optimize(dataset, cfg, have_kb ? &kb : nullptr, out_dir);
            std::printf("best %s %.6f | ensemble %s %.6f (%zu members) | %zu trials\n",
                        metric.c_str(), result.best_loss, metric.c_str(),
                        result.ensemble.validation_loss, result.members.size(),
                        result.trials.size());
            return 0;
        }
        if (*forecast) {
            std::ifstream in(model_path);
            if (!in) throw Error("cannot open model: " + model_path);
            nlohmann::json j;
            in >> j;
            auto members = ensemble_from_json(j);
            const int h = horizon > 0 ? horizon : j.at("horizon").get<int>();
            const Forecasts fc = ensemble_forecast(members, h);
            nlohmann::json out;
            out["horizon"] = h;
            out["forecasts"] = fc;
            if (forecast_out.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                std::ofstream of(forecast_out);
                of << out.dump(2) << "\n";
            }
            return 0;
        }
        if (*bench) {
            BenchmarkSuite suite = BenchmarkSuite::load(suite_path);
            suite.run.workers = resolve_workers(suite.run.workers);
            std::filesystem::create_directories(bench_out);
            BenchmarkResults results = run_benchmark(suite, seeds, bench_out);
            for (const auto &[m, rank] : results.mean_rank) {
                std::printf("%-16s metric %.4f +- %.4f  rank %.2f\n", m.c_str(),
                            results.mean_metric.at(m), results.std_metric.at(m), rank);
            }
            return 0;
        }
        if (*priors) {
            MetaKnowledgeBase kb = build_priors_from_runs(run_dirs, n_c, h_tail);
            kb.save(kb_out);
            std::printf("wrote %s with %zu entries\n", kb_out.c_str(), kb.entries.size());
            return 0;
        }
        if (*synth) {
            std::filesystem::create_directories(synth_out);
            const auto write = [&](const PanelDataset &ds) {
                const std::string base = synth_out + "/" + ds.name;
                save_dataset(ds, base + ".csv", base + ".json");
                std::printf("wrote %s.csv\n", base.c_str());
            };
            if (kind == "trend_season") {
                ts.name = synth_name.empty() ? "trend_season_s" + std::to_string(synth_seed)
                                             : synth_name;
                ts.T = synth_T;
                ts.m = synth_m;
                ts.horizon = synth_h;
                ts.level = level;
                ts.slope = slope;
                ts.amplitude = amplitude;
                ts.noise = noise;
                ts.seed = synth_seed;
                write(synth_trend_season(ts));
            } else if (kind == "ar_process") {
                ar.name = synth_name.empty() ? "ar_process_s" + std::to_string(synth_seed)
                                             : synth_name;
                ar.T = synth_T;
                ar.horizon = synth_h;
                ar.phi1 = phi1;
                ar.phi2 = phi2;
                ar.noise = noise;
                ar.seed = synth_seed;
                write(synth_ar_process(ar));
            } else if (kind == "panel_family") {
                family.name = synth_name.empty() ? "family_s" + std::to_string(synth_seed)
                                                 : synth_name;
                family.count = family_count;
                family.series = family_series;
                family.T = synth_T;
                family.m = synth_m;
                family.horizon = synth_h;
                family.noise = noise;
                family.seed = synth_seed;
                for (const auto &ds : synth_panel_family(family)) write(ds);
            } else {
                throw ConfigError("unknown synth kind '" + kind + "'");
            }
            return 0;
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
