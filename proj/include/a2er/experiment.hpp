#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "a2er/tasks.hpp"
#include "a2er/trainer.hpp"

namespace a2er {

// Full description of one experiment: method x buffer condition, task, stream
// schedule, and every tunable with its default. Serializes to JSON for the
// per-run config echo.
struct ExperimentConfig {
    std::string method = "A2ER";   // DER | -Aa | -Ab | -B | -C | A2ER
    std::string buffer = "O2S";    // RS | Q2S | P2S | O2S | custom
    std::string task = "c1";       // r1..r4 | c1..c4 | s1..s4 (switched)
    std::uint64_t task_seed = 0;   // 0: resolved from the task name
    int seeds = 20;
    int cycles = 0;                // 0: task default (5; switched: 5 per half)
    std::int64_t max_points = 0;   // 0: full stream; otherwise truncate (quick runs)

    std::int64_t n_fifo = 512;
    std::int64_t n_rs = 512;       // total across layers
    int batch = 32;
    double alpha_init = 1.0;
    double beta_init = 0.5;
    double rho = 0.5;
    double lambda = 0.5;
    double q1 = 1.5;               // shallow-layer balance for P2S / O2S
    double q2 = 1.0;               // deep-layer balance, also the Q2S balance
    double zeta = 0.2;

    // single-layer buffer override used by the counter-design sweep
    std::string design = "qlog";
    double design_q = 1.0;

    double lr = 1e-3;
    double lr_mult = 5e-2;
    int train_every = 0;           // 0: task default (16 regression, 32 classification)
    int updates_per_session = 16;

    std::uint64_t root_seed = 42;
    int threads = 0;               // 0: hardware concurrency
    std::string out_dir;
    bool keep_series = true;

    std::string to_json() const;
};

// Flat key=value file (# comments); unknown keys are an error.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct SeriesRow {
    std::int64_t step;
    StepReport report;
};

struct RunResult {
    double final_metric = 0.0;           // KLD (regression) or ACC (classification)
    std::optional<double> second_metric; // switched task: ACC against the second layout
    std::vector<SeriesRow> series;
    std::int64_t feature_miss = 0;
    std::int64_t omission_drops = 0;
};

struct ExperimentSummary {
    std::vector<double> per_seed;                     // final metric per run seed
    std::vector<double> per_seed_second;              // switched only
    double rank_weighted = 0.0;
    bool larger_is_better = false;
};

// One seed, fully deterministic in (config, run_seed).
RunResult run_single(const ExperimentConfig& cfg, std::uint64_t run_seed);

// All seeds (parallel across seeds), plus CSV/JSON artifacts when out_dir is
// set: config.json, seed_<k>_series.csv, summary.csv.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { Rho, Q, Design };
SweepAxis sweep_axis_from_name(const std::string& name);

struct SweepRow {
    std::string label;
    double value = 0.0;            // axis value (rho or q); index for design
    double aggregate = 0.0;        // rank-weighted final metric
    double aggregate_second = 0.0; // switched: second half
    int balanced_seeds = 0;        // switched: seeds with both halves >= threshold
    int seeds = 0;
};

// Sweeps over rho {0.25, 0.5, 0.75}, a q grid for cfg.design, or the three
// counter designs on the switched task (balance threshold in percent).
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                double balance_threshold = 90.0, int grid_points = 21);

// Average weighted by badness rank: the worst value gets weight S, the best 1.
double rank_weighted_mean(std::vector<double> values, bool larger_is_better);

// Fixed task-name table (r1..r4, c1..c4, s1..s4) -> generator seed.
std::uint64_t task_seed_for_name(const std::string& name);

}  // namespace a2er
