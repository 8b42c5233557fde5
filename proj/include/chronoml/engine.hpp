#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoml/config_space.hpp"
#include "chronoml/deadline.hpp"
#include "chronoml/ensemble.hpp"
#include "chronoml/fidelity.hpp"
#include "chronoml/metalearn.hpp"
#include "chronoml/metrics.hpp"
#include "chronoml/pipeline.hpp"
#include "chronoml/series.hpp"

namespace chronoml {

enum class AblationMode { TemplatesOnly, TemplatesMf, TemplatesWs, Full };

AblationMode mode_from_string(const std::string &name);
std::string to_string(AblationMode mode);

// Test hook replacing the pipeline fit+forecast of a trial; used by the
// fault-injection suite.
using EvalOverride = std::function<Forecasts(const Configuration &, const PanelDataset &train,
                                             int horizon, const FitContext &)>;

struct RunConfig {
    double time_budget_s = 300.0;
    double grace_period_s = 60.0;
    std::uint64_t seed = 0;
    LossKind metric = LossKind::MASE;
    AblationMode mode = AblationMode::Full;

    double beta = 10.0;   // prior decay factor
    std::size_t n_d = 5;  // nearest datasets for the prior
    std::size_t n_c = 10; // configurations kept per dataset
    int h_tail = 200;     // tail length for dataset similarity

    BudgetSpec budget;            // multi-fidelity ladder
    std::size_t ensemble_k = 10;
    int workers = 1;
    std::size_t max_trials = 0;   // 0 = bounded by time only
    std::size_t initial_design = 10;
    bool logical_time = false;    // record zero durations for byte-stable logs

    std::string data_csv;   // recorded in report.json for build-priors
    std::string meta_path;

    EvalOverride eval_override;  // not serialized

    void validate() const;
};

struct TrialRecord {
    std::size_t n = 0;
    int rung = 0;
    Configuration config;
    std::vector<double> encoded;
    double budget = 1.0;
    std::string status = "ok";  // ok | failed | timed_out
    double loss = 0.0;          // finite iff ok
    double penalty_loss = 0.0;  // finite iff not ok; what the optimizer sees
    long long wall_ms = 0;
    std::size_t train_obs = 0;
    std::string error;

    bool ok() const { return status == "ok"; }
    double effective_loss() const { return ok() ? loss : penalty_loss; }

    nlohmann::json to_json() const;
    static TrialRecord from_json(const nlohmann::json &j);
};

struct EnsembleMember {
    int trial = 0;
    int multiplicity = 1;
    Pipeline pipeline;  // refitted on the full input dataset
};

struct RunResult {
    std::vector<TrialRecord> trials;
    EnsembleModel ensemble;
    std::vector<EnsembleMember> members;
    double best_loss = 0.0;  // best ok loss at the highest evaluated budget
    nlohmann::json report;
};

// Evaluates one configuration at one budget: truncate train, fit, forecast the
// validation horizon, score. Exceptions, non-finite output, and deadline
// breaches become failed/timed_out records carrying `penalty_loss`
// (2x the worst finite loss seen so far, or 1e6 when none exists).
TrialRecord evaluate_trial(const ConfigSpace &space, const Configuration &config, double budget,
                           int rung, std::size_t n, const TemporalSplit &split,
                           int seasonal_period, LossKind metric, const Deadline &deadline,
                           std::uint64_t seed, double worst_finite, int l_min,
                           const EvalOverride &override_fn, Forecasts *out_forecasts);

// The full loop: holdout split, optional prior construction (leave-one-out by
// dataset name), initial design, successive-halving brackets with
// prior-weighted BO proposals, ensemble selection, member refits. When
// out_dir is non-empty, trials.jsonl is streamed and ensemble.json /
// report.json written on completion.
RunResult optimize(const PanelDataset &dataset, const RunConfig &cfg,
                   const MetaKnowledgeBase *kb = nullptr, const std::string &out_dir = "");

// Weighted-mean forecast over fitted members; members whose forecast fails
// are dropped with a warning, an error is raised only if all drop.
Forecasts ensemble_forecast(std::vector<EnsembleMember> &members, int horizon);

nlohmann::json ensemble_to_json(const RunResult &result, const PanelDataset &dataset,
                                const RunConfig &cfg);
std::vector<EnsembleMember> ensemble_from_json(const nlohmann::json &j);

// ---------------------------------------------------------------------------
// benchmark harness
// ---------------------------------------------------------------------------

struct BenchmarkSuite {
    struct Item {
        std::string csv;
        std::string meta;
    };
    std::vector<Item> datasets;
    std::vector<AblationMode> modes;
    std::string kb_path;  // optional; needed by warm-start modes
    RunConfig run;

    static BenchmarkSuite load(const std::string &path);
};

struct BenchmarkCell {
    std::string dataset;
    AblationMode mode = AblationMode::Full;
    std::uint64_t seed = 0;
    double value = 0.0;  // metric or imputed value
    bool imputed = false;
};

struct BenchmarkResults {
    static constexpr double kRankEpsilon = 1e-6;

    std::vector<BenchmarkCell> cells;
    std::map<std::string, double> mean_metric;  // per mode
    std::map<std::string, double> std_metric;
    std::map<std::string, double> mean_rank;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// Per (dataset, mode, seed) metric on the held-out final horizon. Failed
// cells are imputed with the worst finite result of any mode on that dataset
// plus kRankEpsilon and rank last.
BenchmarkResults run_benchmark(const BenchmarkSuite &suite, int seeds,
                               const std::string &out_dir = "");

// Rank/imputation aggregation, exposed separately so the protocol can be
// tested on synthetic result matrices. NaN marks a failed cell.
BenchmarkResults aggregate_benchmark(const std::vector<BenchmarkCell> &raw);

// ---------------------------------------------------------------------------
// knowledge-base construction
// ---------------------------------------------------------------------------

// Reads run directories (report.json + trials.jsonl), keeps the top n_c
// configurations at the highest evaluated budget, extracts normalized dataset
// tails, and merges everything idempotently.
MetaKnowledgeBase build_priors_from_runs(const std::vector<std::string> &run_dirs,
                                         std::size_t n_c, int h);

// ---------------------------------------------------------------------------
// synthetic data generators
// ---------------------------------------------------------------------------

struct TrendSeasonParams {
    std::string name = "trend_season";
    int T = 300;
    int m = 12;
    int horizon = 12;
    double level = 10.0;
    double slope = 0.05;
    double amplitude = 5.0;
    double noise = 0.5;
    std::uint64_t seed = 0;
};
PanelDataset synth_trend_season(const TrendSeasonParams &p);

struct ArProcessParams {
    std::string name = "ar_process";
    int T = 300;
    int horizon = 12;
    double phi1 = 0.8;
    double phi2 = 0.0;
    double noise = 1.0;
    std::uint64_t seed = 0;
};
PanelDataset synth_ar_process(const ArProcessParams &p);

struct PanelFamilyParams {
    std::string name = "family";
    int count = 5;   // number of related datasets
    int series = 3;  // series per dataset
    int T = 200;
    int m = 12;
    int horizon = 12;
    double noise = 0.4;
    std::uint64_t seed = 0;
};
std::vector<PanelDataset> synth_panel_family(const PanelFamilyParams &p);

// ---------------------------------------------------------------------------
// artifact io
// ---------------------------------------------------------------------------

void write_trials_jsonl(const std::vector<TrialRecord> &trials, const std::string &path);
std::vector<TrialRecord> read_trials_jsonl(const std::string &path);

}  // namespace chronoml
