#include "chronoml/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include "chronoml/surrogate.hpp"

namespace chronoml {
namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point from) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - from).count();
}

void run_parallel(std::size_t n_tasks, int workers, const std::function<void(std::size_t)> &fn) {
    if (workers <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(n_tasks));
    for (int w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks) return;
                fn(i);
            }
        });
    }
    for (auto &t : pool) t.join();
}

std::size_t panel_observations(const PanelDataset &panel) {
    std::size_t total = 0;
    for (const auto &s : panel.series) total += s.length();
    return total;
}

}  // namespace

AblationMode mode_from_string(const std::string &name) {
    if (name == "templates_only") return AblationMode::TemplatesOnly;
    if (name == "templates_mf") return AblationMode::TemplatesMf;
    if (name == "templates_ws") return AblationMode::TemplatesWs;
    if (name == "full") return AblationMode::Full;
    throw ConfigError("unknown mode '" + name +
                      "' (expected templates_only, templates_mf, templates_ws, full)");
}

std::string to_string(AblationMode mode) {
    switch (mode) {
        case AblationMode::TemplatesOnly: return "templates_only";
        case AblationMode::TemplatesMf: return "templates_mf";
        case AblationMode::TemplatesWs: return "templates_ws";
        case AblationMode::Full: return "full";
    }
    return "?";
}

void RunConfig::validate() const {
    if (time_budget_s <= 0.0) throw ConfigError("time budget must be positive");
    if (grace_period_s < 0.0) throw ConfigError("grace period must be nonnegative");
    if (grace_period_s > time_budget_s) throw ConfigError("grace period exceeds time budget");
    if (ensemble_k < 1) throw ConfigError("ensemble size must be >= 1");
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    if (initial_design < 3) throw ConfigError("initial design must cover the 3 template defaults");
    budget.validate();
}

nlohmann::json TrialRecord::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["rung"] = rung;
    j["config"] = config.to_json();
    j["encoded"] = encoded;
    j["budget"] = budget;
    j["status"] = status;
    j["loss"] = ok() ? nlohmann::json(loss) : nlohmann::json();
    j["penalty_loss"] = ok() ? nlohmann::json() : nlohmann::json(penalty_loss);
    j["wall_ms"] = wall_ms;
    j["train_obs"] = train_obs;
    j["error"] = error;
    return j;
}

TrialRecord TrialRecord::from_json(const nlohmann::json &j) {
    TrialRecord r;
    r.n = j.at("n").get<std::size_t>();
    r.rung = j.at("rung").get<int>();
    r.config = Configuration::from_json(j.at("config"));
    r.encoded = j.at("encoded").get<std::vector<double>>();
    r.budget = j.at("budget").get<double>();
    r.status = j.at("status").get<std::string>();
    if (!j.at("loss").is_null()) r.loss = j.at("loss").get<double>();
    if (!j.at("penalty_loss").is_null()) r.penalty_loss = j.at("penalty_loss").get<double>();
    r.wall_ms = j.at("wall_ms").get<long long>();
    r.train_obs = j.at("train_obs").get<std::size_t>();
    r.error = j.value("error", "");
    return r;
}

TrialRecord evaluate_trial(const ConfigSpace &space, const Configuration &config, double budget,
                           int rung, std::size_t n, const TemporalSplit &split,
                           int seasonal_period, LossKind metric, const Deadline &deadline,
                           std::uint64_t seed, double worst_finite, int l_min,
                           const EvalOverride &override_fn, Forecasts *out_forecasts) {
    TrialRecord rec;
    rec.n = n;
    rec.rung = rung;
    rec.config = config;
    rec.encoded = space.encode(config);
    rec.budget = budget;
    const auto start = Clock::now();
    try {
        deadline.check();
        PanelDataset train = truncate(split.train, budget, l_min);
        rec.train_obs = panel_observations(train);
        FitContext ctx;
        ctx.seasonal_period = seasonal_period;
        ctx.seed = seed;
        ctx.deadline = &deadline;

        Forecasts fc;
        if (override_fn) {
            fc = override_fn(config, train, split.horizon, ctx);
        } else {
            Pipeline pipeline(config);
            pipeline.fit(train, ctx);
            fc = pipeline.forecast(split.horizon);
        }
        for (const auto &series : fc) {
            if (series.size() != static_cast<std::size_t>(split.horizon)) {
                throw Error("forecast does not cover the validation horizon");
            }
            for (const auto &row : series) {
                for (double v : row) {
                    if (!std::isfinite(v)) throw NumericalError("non-finite forecast value");
                }
            }
        }
        rec.loss = panel_loss(metric, split.validation, fc, split.train, seasonal_period);
        if (!std::isfinite(rec.loss)) throw NumericalError("non-finite validation loss");
        rec.status = "ok";
        if (out_forecasts) *out_forecasts = std::move(fc);
    } catch (const TimedOutError &e) {
        rec.status = "timed_out";
        rec.error = e.what();
    } catch (const std::exception &e) {
        rec.status = "failed";
        rec.error = e.what();
    }
    if (!rec.ok()) {
        rec.penalty_loss = std::isfinite(worst_finite) ? 2.0 * worst_finite : 1e6;
    }
    rec.wall_ms = elapsed_ms(start);
    return rec;
}

namespace {

struct Optimizer {
    const PanelDataset &dataset;
    const RunConfig &cfg;
    const MetaKnowledgeBase *kb;
    std::string out_dir;

    ConfigSpace space = make_forecast_space();
    TemporalSplit split;
    std::optional<PriorModel> prior;
    bool multi_fidelity = false;

    Clock::time_point start = Clock::now();
    Clock::time_point soft_end;
    Deadline hard_deadline;

    std::vector<TrialRecord> trials;
    std::map<std::size_t, Forecasts> ok_forecasts;
    double worst_finite = std::numeric_limits<double>::quiet_NaN();
    std::optional<SurrogateModel> surrogate;
    std::size_t ok_count = 0;
    std::ofstream trials_stream;

    Rng rng_init;
    Rng rng_propose;

    Optimizer(const PanelDataset &ds, const RunConfig &rc, const MetaKnowledgeBase *k,
              std::string out)
        : dataset(ds),
          cfg(rc),
          kb(k),
          out_dir(std::move(out)),
          rng_init(mix_seed(rc.seed, 1)),
          rng_propose(mix_seed(rc.seed, 2)) {}

    bool can_launch() const {
        if (cfg.max_trials > 0 && trials.size() >= cfg.max_trials) return false;
        return Clock::now() < soft_end;
    }

    void setup() {
        cfg.validate();
        dataset.validate();
        split = temporal_holdout(dataset, dataset.horizon);
        soft_end = start + std::chrono::microseconds(
                               static_cast<long long>(cfg.time_budget_s * 1e6));
        hard_deadline = Deadline(
            soft_end + std::chrono::microseconds(
                           static_cast<long long>(cfg.grace_period_s * 1e6)));
        multi_fidelity =
            cfg.mode == AblationMode::Full || cfg.mode == AblationMode::TemplatesMf;
        const bool wants_prior =
            cfg.mode == AblationMode::Full || cfg.mode == AblationMode::TemplatesWs;
        if (cfg.mode == AblationMode::TemplatesWs && (!kb || kb->entries.empty())) {
            throw ConfigError("warm-start mode requires a knowledge base");
        }
        if (wants_prior && kb && !kb->entries.empty()) {
            if (!kb->space_version.empty() && kb->space_version != space.version()) {
                throw SchemaError("knowledge base was built for space " + kb->space_version +
                                  ", current space is " + space.version());
            }
            // leave-one-out: never learn from the dataset being optimized
            MetaKnowledgeBase filtered;
            filtered.space_version = kb->space_version;
            for (const auto &e : kb->entries) {
                if (e.name != dataset.name) filtered.entries.push_back(e);
            }
            if (!filtered.entries.empty()) {
                prior = PriorModel::build(filtered, dataset, space, cfg.n_d, cfg.h_tail);
            } else if (cfg.mode == AblationMode::TemplatesWs) {
                throw ConfigError("knowledge base only covers the target dataset");
            }
        }
        if (!out_dir.empty()) {
            trials_stream.open(out_dir + "/trials.jsonl");
            if (!trials_stream) throw Error("cannot write " + out_dir + "/trials.jsonl");
        }
    }

    void append(TrialRecord rec, Forecasts fc) {
        rec.n = trials.size();
        if (cfg.logical_time) rec.wall_ms = 0;
        if (rec.ok()) {
            if (std::isnan(worst_finite) || rec.loss > worst_finite) worst_finite = rec.loss;
            ok_forecasts[rec.n] = std::move(fc);
            ++ok_count;
        }
        if (trials_stream.is_open()) {
            trials_stream << rec.to_json().dump() << "\n";
            trials_stream.flush();
        }
        trials.push_back(std::move(rec));
        refit_surrogate();
    }

    void refit_surrogate() {
        if (ok_count < 2) return;
        std::vector<std::vector<double>> rows;
        std::vector<double> losses;
        rows.reserve(trials.size());
        for (const auto &t : trials) {
            auto x = t.encoded;
            x.push_back(t.budget);
            rows.push_back(std::move(x));
            losses.push_back(t.effective_loss());
        }
        surrogate = SurrogateModel::fit(rows, losses, mix_seed(cfg.seed, 5000 + trials.size()));
    }

    double f_min() const {
        double top_budget = -1.0;
        for (const auto &t : trials) {
            if (t.ok()) top_budget = std::max(top_budget, t.budget);
        }
        double best = std::numeric_limits<double>::infinity();
        for (const auto &t : trials) {
            if (t.ok() && t.budget == top_budget) best = std::min(best, t.loss);
        }
        return best;
    }

    std::vector<Configuration> incumbents(std::size_t limit) const {
        std::vector<std::size_t> order(trials.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return trials[a].effective_loss() < trials[b].effective_loss();
        });
        std::vector<Configuration> out;
        for (std::size_t i : order) {
            const auto &c = trials[i].config;
            if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
            if (out.size() >= limit) break;
        }
        return out;
    }

    bool prior_active() const {
        return prior.has_value() &&
               (cfg.mode == AblationMode::Full || cfg.mode == AblationMode::TemplatesWs);
    }

    Configuration propose_next() {
        ProposeInputs inputs;
        inputs.model = surrogate ? &*surrogate : nullptr;
        inputs.f_min = f_min();
        inputs.n_trials = std::max<std::size_t>(trials.size(), 1);
        inputs.beta = cfg.beta;
        inputs.prior = prior_active() ? &*prior : nullptr;
        inputs.budget = cfg.budget.b_max;
        inputs.incumbents = incumbents(10);
        return propose(space, inputs, rng_propose);
    }

    // Evaluates tasks, appending results in task order; stops launching once
    // the soft deadline or trial cap is hit. Returns indices of appended
    // trials.
    std::vector<std::size_t> evaluate_batch(const std::vector<Configuration> &configs,
                                            double budget, int rung) {
        std::vector<std::size_t> appended;
        if (cfg.workers <= 1) {
            for (const auto &config : configs) {
                if (!can_launch()) break;
                Forecasts fc;
                TrialRecord rec = evaluate_trial(
                    space, config, budget, rung, trials.size(), split, dataset.seasonal_period,
                    cfg.metric, hard_deadline, mix_seed(cfg.seed, 100000 + trials.size()),
                    worst_finite, cfg.budget.l_min, cfg.eval_override, &fc);
                appended.push_back(trials.size());
                append(std::move(rec), std::move(fc));
            }
            return appended;
        }

        const std::size_t n0 = trials.size();
        const double worst_snapshot = worst_finite;
        std::vector<TrialRecord> recs(configs.size());
        std::vector<Forecasts> fcs(configs.size());
        std::vector<char> started(configs.size(), 0);
        std::size_t launchable = configs.size();
        if (cfg.max_trials > 0) {
            launchable = std::min(launchable, cfg.max_trials - n0);
        }
        run_parallel(launchable, cfg.workers, [&](std::size_t i) {
            if (Clock::now() >= soft_end) return;
            started[i] = 1;
            recs[i] = evaluate_trial(space, configs[i], budget, rung, n0 + i, split,
                                     dataset.seasonal_period, cfg.metric, hard_deadline,
                                     mix_seed(cfg.seed, 100000 + n0 + i), worst_snapshot,
                                     cfg.budget.l_min, cfg.eval_override, &fcs[i]);
        });
        for (std::size_t i = 0; i < launchable; ++i) {
            if (!started[i]) continue;
            appended.push_back(trials.size());
            append(std::move(recs[i]), std::move(fcs[i]));
        }
        return appended;
    }

    std::vector<Configuration> initial_design() {
        std::vector<Configuration> configs;
        for (const char *tmpl : {"statistical", "ml", "dnn"}) {
            configs.push_back(space.default_config({{"template", ParamValue(std::string(tmpl))}}));
        }
        while (configs.size() < cfg.initial_design) {
            configs.push_back(prior_active() ? prior->sample(rng_init) : space.sample(rng_init));
        }
        if (cfg.max_trials > 0 && configs.size() > cfg.max_trials) {
            configs.resize(cfg.max_trials);
        }
        return configs;
    }

    void run_bracket(std::vector<Configuration> configs) {
        const auto rungs = sh_schedule(cfg.budget, configs.size());
        for (std::size_t j = 0; j < rungs.size(); ++j) {
            const auto appended = evaluate_batch(configs, rungs[j].budget, static_cast<int>(j));
            if (appended.size() < configs.size()) return;  // deadline hit mid-rung
            if (j + 1 >= rungs.size()) return;
            std::vector<double> losses;
            for (std::size_t idx : appended) losses.push_back(trials[idx].effective_loss());
            const auto keep = promote(losses, rungs[j + 1].survivors);
            std::vector<Configuration> promoted;
            for (std::size_t k : keep) promoted.push_back(configs[k]);
            configs = std::move(promoted);
        }
    }

    void search_loop() {
        if (multi_fidelity) {
            // width of a fresh bracket: eta^(rungs-1)
            std::size_t bracket_size = 1;
            const auto ladder = sh_schedule(cfg.budget, 1);
            for (std::size_t j = 1; j < ladder.size(); ++j) {
                bracket_size *= static_cast<std::size_t>(cfg.budget.eta);
            }
            bool first = true;
            while (can_launch()) {
                std::vector<Configuration> rung0;
                if (first) {
                    rung0 = initial_design();
                    first = false;
                } else {
                    std::size_t want = bracket_size;
                    if (cfg.max_trials > 0) {
                        want = std::min(want, cfg.max_trials - trials.size());
                    }
                    for (std::size_t i = 0; i < want; ++i) rung0.push_back(propose_next());
                }
                if (rung0.empty()) break;
                run_bracket(std::move(rung0));
            }
        } else {
            auto design = initial_design();
            evaluate_batch(design, cfg.budget.b_max, 0);
            while (can_launch()) {
                const std::size_t batch =
                    cfg.workers > 1 ? static_cast<std::size_t>(cfg.workers) : 1;
                std::vector<Configuration> configs;
                for (std::size_t i = 0; i < batch; ++i) configs.push_back(propose_next());
                evaluate_batch(configs, cfg.budget.b_max, 0);
            }
        }
    }

    RunResult finish() {
        RunResult result;
        result.trials = trials;

        double top_budget = -1.0;
        for (const auto &t : trials) {
            if (t.ok()) top_budget = std::max(top_budget, t.budget);
        }
        if (top_budget < 0.0) {
            write_report(result, false);
            throw Error("every trial failed; see trials.jsonl");
        }

        std::vector<Candidate> pool;
        for (const auto &t : trials) {
            if (t.ok() && t.budget == top_budget) {
                pool.push_back({static_cast<int>(t.n), ok_forecasts.at(t.n), t.loss});
            }
        }
        result.best_loss = f_min();

        const auto loss_fn = [&](const Forecasts &fc) {
            return panel_loss(cfg.metric, split.validation, fc, split.train,
                              dataset.seasonal_period);
        };
        result.ensemble = ensemble_select(pool, cfg.ensemble_k, loss_fn);

        // refit members on the full input data; a short extension past the
        // hard deadline keeps degenerate budgets from dropping everything
        const Deadline refit_deadline = Deadline::after(4.0);
        std::set<int> unique_ids(result.ensemble.members.begin(), result.ensemble.members.end());
        std::map<int, int> multiplicity;
        for (int id : result.ensemble.members) multiplicity[id]++;
        for (int id : unique_ids) {
            const auto &rec = trials[static_cast<std::size_t>(id)];
            EnsembleMember member;
            member.trial = id;
            member.multiplicity = multiplicity[id];
            member.pipeline = Pipeline(rec.config);
            FitContext ctx;
            ctx.seasonal_period = dataset.seasonal_period;
            ctx.seed = mix_seed(cfg.seed, 100000 + static_cast<std::size_t>(id));
            ctx.deadline = &refit_deadline;
            try {
                member.pipeline.fit(dataset, ctx);
                result.members.push_back(std::move(member));
            } catch (const std::exception &e) {
                std::fprintf(stderr, "warning: ensemble member %d dropped at refit: %s\n", id,
                             e.what());
            }
        }
        if (result.members.empty()) {
            write_report(result, false);
            throw Error("every ensemble member failed to refit");
        }

        write_report(result, true);
        if (!out_dir.empty()) {
            std::ofstream ens(out_dir + "/ensemble.json");
            ens << ensemble_to_json(result, dataset, cfg).dump(2) << "\n";
            std::ofstream rep(out_dir + "/report.json");
            rep << result.report.dump(2) << "\n";
        }
        return result;
    }

    void write_report(RunResult &result, bool complete) {
        nlohmann::json status_counts = {{"ok", 0}, {"failed", 0}, {"timed_out", 0}};
        std::size_t train_obs_total = 0;
        for (const auto &t : trials) {
            status_counts[t.status] = status_counts[t.status].get<int>() + 1;
            train_obs_total += t.train_obs;
        }
        nlohmann::json report;
        report["dataset"] = dataset.name;
        report["data_csv"] = cfg.data_csv;
        report["meta_path"] = cfg.meta_path;
        report["mode"] = to_string(cfg.mode);
        report["metric"] = to_string(cfg.metric);
        report["seed"] = cfg.seed;
        report["space_version"] = space.version();
        report["n_trials"] = trials.size();
        report["status_counts"] = status_counts;
        report["train_obs_total"] = train_obs_total;
        report["budget_s"] = cfg.time_budget_s;
        report["grace_s"] = cfg.grace_period_s;
        report["wall_ms"] = cfg.logical_time ? 0 : elapsed_ms(start);
        report["complete"] = complete;
        if (complete) {
            report["best_loss"] = result.best_loss;
            report["ensemble_validation_loss"] = result.ensemble.validation_loss;
            report["ensemble_size"] = result.ensemble.members.size();
        }
        result.report = std::move(report);
        if (!complete && !out_dir.empty()) {
            std::ofstream rep(out_dir + "/report.json");
            rep << result.report.dump(2) << "\n";
        }
    }
};

}  // namespace

RunResult optimize(const PanelDataset &dataset, const RunConfig &cfg,
                   const MetaKnowledgeBase *kb, const std::string &out_dir) {
    Optimizer opt(dataset, cfg, kb, out_dir);
    opt.setup();
    opt.search_loop();
    return opt.finish();
}

Forecasts ensemble_forecast(std::vector<EnsembleMember> &members, int horizon) {
    std::vector<Forecasts> forecasts;
    std::vector<int> weights;
    for (auto &m : members) {
        try {
            forecasts.push_back(m.pipeline.forecast(horizon));
            weights.push_back(m.multiplicity);
        } catch (const std::exception &e) {
            std::fprintf(stderr, "warning: ensemble member %d dropped at forecast: %s\n", m.trial,
                         e.what());
        }
    }
    if (forecasts.empty()) throw Error("every ensemble member failed to forecast");
    Forecasts avg = forecasts.front();
    double total = weights.front();
    for (auto &series : avg) {
        for (auto &row : series) {
            for (double &v : row) v *= static_cast<double>(weights.front());
        }
    }
    for (std::size_t m = 1; m < forecasts.size(); ++m) {
        total += weights[m];
        for (std::size_t i = 0; i < avg.size(); ++i) {
            for (std::size_t h = 0; h < avg[i].size(); ++h) {
                for (std::size_t k = 0; k < avg[i][h].size(); ++k) {
                    avg[i][h][k] += weights[m] * forecasts[m][i][h][k];
                }
            }
        }
    }
    for (auto &series : avg) {
        for (auto &row : series) {
            for (double &v : row) v /= total;
        }
    }
    return avg;
}

nlohmann::json ensemble_to_json(const RunResult &result, const PanelDataset &dataset,
                                const RunConfig &cfg) {
    nlohmann::json j;
    j["space_version"] = make_forecast_space().version();
    j["dataset"] = dataset.name;
    j["metric"] = to_string(cfg.metric);
    j["horizon"] = dataset.horizon;
    j["seasonal_period"] = dataset.seasonal_period;
    j["validation_loss"] = result.ensemble.validation_loss;
    j["members"] = nlohmann::json::array();
    for (const auto &m : result.members) {
        j["members"].push_back({{"trial", m.trial},
                                {"multiplicity", m.multiplicity},
                                {"pipeline", m.pipeline.save()}});
    }
    return j;
}

std::vector<EnsembleMember> ensemble_from_json(const nlohmann::json &j) {
    std::vector<EnsembleMember> members;
    for (const auto &jm : j.at("members")) {
        EnsembleMember m;
        m.trial = jm.at("trial").get<int>();
        m.multiplicity = jm.at("multiplicity").get<int>();
        m.pipeline = Pipeline::load(jm.at("pipeline"));
        members.push_back(std::move(m));
    }
    return members;
}

// ---------------------------------------------------------------------------
// benchmark harness
// ---------------------------------------------------------------------------

BenchmarkSuite BenchmarkSuite::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open suite file: " + path);
    nlohmann::json j;
    in >> j;
    BenchmarkSuite suite;
    for (const auto &d : j.at("datasets")) {
        suite.datasets.push_back({d.at("csv").get<std::string>(), d.at("meta").get<std::string>()});
    }
    for (const auto &m : j.at("modes")) {
        suite.modes.push_back(mode_from_string(m.get<std::string>()));
    }
    suite.kb_path = j.value("kb", "");
    if (j.contains("run")) {
        const auto &r = j.at("run");
        suite.run.time_budget_s = r.value("budget_s", suite.run.time_budget_s);
        suite.run.grace_period_s = r.value("grace_s", suite.run.grace_period_s);
        suite.run.max_trials = r.value("max_trials", suite.run.max_trials);
        suite.run.metric = loss_kind_from_string(r.value("metric", std::string("mase")));
        suite.run.seed = r.value("seed", suite.run.seed);
        suite.run.workers = r.value("workers", suite.run.workers);
    }
    return suite;
}

BenchmarkResults aggregate_benchmark(const std::vector<BenchmarkCell> &raw) {
    BenchmarkResults results;
    results.cells = raw;

    std::set<std::string> datasets;
    std::set<std::string> modes;
    for (const auto &c : raw) {
        datasets.insert(c.dataset);
        modes.insert(to_string(c.mode));
    }

    // impute failed cells with the worst finite result on the dataset + eps
    for (const auto &ds : datasets) {
        double worst = std::numeric_limits<double>::quiet_NaN();
        for (const auto &c : raw) {
            if (c.dataset == ds && std::isfinite(c.value)) {
                worst = std::isnan(worst) ? c.value : std::max(worst, c.value);
            }
        }
        const double fill =
            (std::isnan(worst) ? 1e6 : worst) + BenchmarkResults::kRankEpsilon;
        for (auto &c : results.cells) {
            if (c.dataset == ds && !std::isfinite(c.value)) {
                c.value = fill;
                c.imputed = true;
            }
        }
    }

    // per (dataset, mode) mean over seeds
    std::map<std::string, std::map<std::string, double>> table;  // dataset -> mode -> mean
    for (const auto &ds : datasets) {
        for (const auto &mode : modes) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto &c : results.cells) {
                if (c.dataset == ds && to_string(c.mode) == mode) {
                    sum += c.value;
                    ++n;
                }
            }
            if (n > 0) table[ds][mode] = sum / static_cast<double>(n);
        }
    }

    // mean +- std over datasets, average ranks with ties
    for (const auto &mode : modes) {
        std::vector<double> values;
        for (const auto &ds : datasets) values.push_back(table[ds][mode]);
        double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        results.mean_metric[mode] = mean;
        results.std_metric[mode] = std::sqrt(var);
        results.mean_rank[mode] = 0.0;
    }
    for (const auto &ds : datasets) {
        std::vector<std::pair<double, std::string>> entries;
        for (const auto &mode : modes) entries.push_back({table[ds][mode], mode});
        std::sort(entries.begin(), entries.end());
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            while (j + 1 < entries.size() && entries[j + 1].first == entries[i].first) ++j;
            const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) results.mean_rank[entries[k].second] += rank;
            i = j + 1;
        }
    }
    for (auto &[mode, r] : results.mean_rank) r /= static_cast<double>(datasets.size());
    return results;
}

BenchmarkResults run_benchmark(const BenchmarkSuite &suite, int seeds,
                               const std::string &out_dir) {
    if (suite.datasets.empty() || suite.modes.empty()) {
        throw ConfigError("benchmark needs at least one dataset and one mode");
    }
    std::optional<MetaKnowledgeBase> kb;
    if (!suite.kb_path.empty()) kb = MetaKnowledgeBase::load(suite.kb_path);

    std::vector<BenchmarkCell> raw;
    for (const auto &item : suite.datasets) {
        const PanelDataset ds = load_dataset(item.csv, item.meta);
        const TemporalSplit test_split = temporal_holdout(ds, ds.horizon);
        for (const auto mode : suite.modes) {
            for (int s = 0; s < seeds; ++s) {
                RunConfig cfg = suite.run;
                cfg.mode = mode;
                cfg.seed = suite.run.seed + static_cast<std::uint64_t>(s);
                BenchmarkCell cell;
                cell.dataset = ds.name;
                cell.mode = mode;
                cell.seed = cfg.seed;
                cell.value = std::numeric_limits<double>::quiet_NaN();
                try {
                    RunResult run = optimize(test_split.train, cfg, kb ? &*kb : nullptr);
                    Forecasts fc = ensemble_forecast(run.members, ds.horizon);
                    cell.value = panel_loss(cfg.metric, test_split.validation, fc,
                                            test_split.train, ds.seasonal_period);
                } catch (const std::exception &e) {
                    std::fprintf(stderr, "benchmark cell (%s, %s, seed %d) failed: %s\n",
                                 ds.name.c_str(), to_string(mode).c_str(), s, e.what());
                }
                raw.push_back(cell);
            }
        }
    }
    BenchmarkResults results = aggregate_benchmark(raw);
    if (!out_dir.empty()) {
        std::ofstream csv(out_dir + "/results.csv");
        csv << results.to_csv();
        std::ofstream json(out_dir + "/results.json");
        json << results.to_json().dump(2) << "\n";
    }
    return results;
}

std::string BenchmarkResults::to_csv() const {
    std::string out = "dataset,mode,seed,value,imputed\n";
    char buf[128];
    for (const auto &c : cells) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%.17g,%d\n", c.dataset.c_str(),
                      to_string(c.mode).c_str(), static_cast<unsigned long long>(c.seed), c.value,
                      c.imputed ? 1 : 0);
        out += buf;
    }
    return out;
}

nlohmann::json BenchmarkResults::to_json() const {
    nlohmann::json j;
    j["cells"] = nlohmann::json::array();
    for (const auto &c : cells) {
        j["cells"].push_back({{"dataset", c.dataset},
                              {"mode", to_string(c.mode)},
                              {"seed", c.seed},
                              {"value", c.value},
                              {"imputed", c.imputed}});
    }
    j["mean_metric"] = mean_metric;
    j["std_metric"] = std_metric;
    j["mean_rank"] = mean_rank;
    return j;
}

// ---------------------------------------------------------------------------
// knowledge-base construction
// ---------------------------------------------------------------------------

MetaKnowledgeBase build_priors_from_runs(const std::vector<std::string> &run_dirs,
                                         std::size_t n_c, int h) {
    const ConfigSpace space = make_forecast_space();
    MetaKnowledgeBase kb;
    kb.space_version = space.version();
    for (const auto &dir : run_dirs) {
        std::ifstream rep_in(dir + "/report.json");
        if (!rep_in) throw Error("cannot open " + dir + "/report.json");
        nlohmann::json report;
        rep_in >> report;
        const std::string version = report.value("space_version", "");
        if (version != space.version()) {
            throw SchemaError("run " + dir + " used space " + version + ", current space is " +
                              space.version());
        }
        const auto trials = read_trials_jsonl(dir + "/trials.jsonl");
        double top_budget = -1.0;
        for (const auto &t : trials) {
            if (t.ok()) top_budget = std::max(top_budget, t.budget);
        }
        if (top_budget < 0.0) continue;  // nothing usable in this run

        MetaKnowledgeBase single;
        single.space_version = space.version();
        KbEntry entry;
        entry.name = report.at("dataset").get<std::string>();
        const PanelDataset ds = load_dataset(report.at("data_csv").get<std::string>(),
                                             report.at("meta_path").get<std::string>());
        for (const auto &s : ds.series) entry.tails.push_back(normalized_tail(s, h));
        for (const auto &t : trials) {
            if (t.ok() && t.budget == top_budget) entry.configs.push_back({t.config, t.loss});
        }
        single.entries.push_back(std::move(entry));
        kb.merge(single, n_c);
    }
    return kb;
}

// ---------------------------------------------------------------------------
// synthetic data generators
// ---------------------------------------------------------------------------

PanelDataset synth_trend_season(const TrendSeasonParams &p) {
    PanelDataset ds;
    ds.name = p.name;
    ds.horizon = p.horizon;
    ds.seasonal_period = p.m;
    TimeSeriesRecord rec;
    rec.id = "s0";
    Rng rng(mix_seed(p.seed, 0xbeef));
    for (int t = 0; t < p.T; ++t) {
        const double season = p.amplitude * std::sin(2.0 * M_PI * t / p.m);
        double v = p.level + p.slope * t + season;
        if (p.noise > 0.0) v += normal(rng, 0.0, p.noise);
        rec.targets.push_back({v});
    }
    ds.series.push_back(std::move(rec));
    return ds;
}

PanelDataset synth_ar_process(const ArProcessParams &p) {
    PanelDataset ds;
    ds.name = p.name;
    ds.horizon = p.horizon;
    ds.seasonal_period = 1;
    TimeSeriesRecord rec;
    rec.id = "s0";
    Rng rng(mix_seed(p.seed, 0xa4));
    double y1 = 0.0, y2 = 0.0;
    for (int t = 0; t < p.T + 50; ++t) {  // 50 burn-in steps
        const double v = p.phi1 * y1 + p.phi2 * y2 + normal(rng, 0.0, p.noise);
        y2 = y1;
        y1 = v;
        if (t >= 50) rec.targets.push_back({v});
    }
    ds.series.push_back(std::move(rec));
    return ds;
}

std::vector<PanelDataset> synth_panel_family(const PanelFamilyParams &p) {
    std::vector<PanelDataset> family;
    for (int d = 0; d < p.count; ++d) {
        PanelDataset ds;
        ds.name = p.name + "_" + std::to_string(d);
        ds.horizon = p.horizon;
        ds.seasonal_period = p.m;
        // related datasets: shared seasonality and trend shape, varying
        // amplitude, level and noise realization
        const double amplitude = 4.0 * (1.0 + 0.15 * d);
        const double slope = 0.04 * (1.0 + 0.1 * d);
        for (int i = 0; i < p.series; ++i) {
            TimeSeriesRecord rec;
            rec.id = "s" + std::to_string(i);
            Rng rng(mix_seed(p.seed, static_cast<std::uint64_t>(d) * 1000 +
                                         static_cast<std::uint64_t>(i)));
            const double level = 10.0 + 3.0 * i + 2.0 * d;
            for (int t = 0; t < p.T; ++t) {
                double v = level + slope * t + amplitude * std::sin(2.0 * M_PI * t / p.m);
                if (p.noise > 0.0) v += normal(rng, 0.0, p.noise);
                rec.targets.push_back({v});
            }
            ds.series.push_back(std::move(rec));
        }
        family.push_back(std::move(ds));
    }
    return family;
}

// ---------------------------------------------------------------------------
// artifact io
// ---------------------------------------------------------------------------

void write_trials_jsonl(const std::vector<TrialRecord> &trials, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto &t : trials) out << t.to_json().dump() << "\n";
}

std::vector<TrialRecord> read_trials_jsonl(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<TrialRecord> trials;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            trials.push_back(TrialRecord::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception &e) {
            throw ParseError("bad trial record at " + path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return trials;
}

}  // namespace chronoml
