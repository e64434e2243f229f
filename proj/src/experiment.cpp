#include "a2er/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "a2er/parallel.hpp"
#include "a2er/rng.hpp"
#include "a2er/snapshot.hpp"

namespace a2er {

using nlohmann::json;

namespace {

enum class TaskKind { Regression, Classification, Switched };

struct ResolvedTask {
    TaskKind kind;
    SineMixtureTask sine;
    GaussianGridTask grid_a;
    GaussianGridTask grid_b;  // switched only
};

TaskKind task_kind_for_name(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty task name");
    switch (name[0]) {
        case 'r': return TaskKind::Regression;
        case 'c': return TaskKind::Classification;
        case 's': return TaskKind::Switched;
        default: throw std::invalid_argument("unknown task: " + name);
    }
}

ResolvedTask resolve_task(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.task_seed != 0 ? cfg.task_seed : task_seed_for_name(cfg.task);
    ResolvedTask t{task_kind_for_name(cfg.task), {}, {}, {}};
    switch (t.kind) {
        case TaskKind::Regression:
            t.sine = SineMixtureTask::generate(seed);
            break;
        case TaskKind::Classification:
            t.grid_a = GaussianGridTask::generate(seed);
            break;
        case TaskKind::Switched:
            t.grid_a = GaussianGridTask::generate(seed);
            // same class count, fresh layout
            t.grid_b = GaussianGridTask::generate_with_count(
                derive_seed(seed, 0xa15), static_cast<int>(t.grid_a.means.size()));
            break;
    }
    return t;
}

StackConfig stack_config(const ExperimentConfig& cfg) {
    StackConfig sc;
    sc.zeta = 0.0;
    if (cfg.buffer == "RS") {
        sc.layers = {{cfg.n_rs, {CounterKind::QLog, 0.0}}};
    } else if (cfg.buffer == "Q2S") {
        sc.layers = {{cfg.n_rs, {CounterKind::QLog, cfg.q2}}};
    } else if (cfg.buffer == "P2S" || cfg.buffer == "O2S") {
        const std::int64_t half = cfg.n_rs / 2;
        sc.layers = {{half, {CounterKind::QLog, cfg.q1}},
                     {cfg.n_rs - half, {CounterKind::QLog, cfg.q2}}};
        if (cfg.buffer == "O2S") sc.zeta = cfg.zeta;
    } else if (cfg.buffer == "custom") {
        sc.layers = {{cfg.n_rs, {counter_kind_from_name(cfg.design), cfg.design_q}}};
    } else {
        throw std::invalid_argument("unknown buffer condition: " + cfg.buffer);
    }
    return sc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::uint64_t task_seed_for_name(const std::string& name) {
    if (name.size() == 2 && name[1] >= '1' && name[1] <= '4') {
        const std::uint64_t k = static_cast<std::uint64_t>(name[1] - '0');
        if (name[0] == 'r') return 0x7e11 + k;
        if (name[0] == 'c') return 0xc1a5 + k;
        if (name[0] == 's') return 0x5317 + k;
    }
    throw std::invalid_argument("unknown task: " + name);
}

std::string ExperimentConfig::to_json() const {
    json j{{"method", method},
           {"buffer", buffer},
           {"task", task},
           {"task_seed", task_seed},
           {"seeds", seeds},
           {"cycles", cycles},
           {"max_points", max_points},
           {"n_fifo", n_fifo},
           {"n_rs", n_rs},
           {"batch", batch},
           {"alpha_init", alpha_init},
           {"beta_init", beta_init},
           {"rho", rho},
           {"lambda", lambda},
           {"q1", q1},
           {"q2", q2},
           {"zeta", zeta},
           {"design", design},
           {"design_q", design_q},
           {"lr", lr},
           {"lr_mult", lr_mult},
           {"train_every", train_every},
           {"updates_per_session", updates_per_session},
           {"root_seed", root_seed},
           {"threads", threads},
           {"out_dir", out_dir}};
    return j.dump(2);
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto as_i64 = [&] { return static_cast<std::int64_t>(std::stoll(value)); };
    auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_dbl = [&] { return std::stod(value); };

    if (key == "method") cfg.method = value;
    else if (key == "buffer") cfg.buffer = value;
    else if (key == "task") cfg.task = value;
    else if (key == "task_seed") cfg.task_seed = as_u64();
    else if (key == "seeds") cfg.seeds = as_int();
    else if (key == "cycles") cfg.cycles = as_int();
    else if (key == "max_points") cfg.max_points = as_i64();
    else if (key == "n_fifo") cfg.n_fifo = as_i64();
    else if (key == "n_rs") cfg.n_rs = as_i64();
    else if (key == "batch") cfg.batch = as_int();
    else if (key == "alpha_init") cfg.alpha_init = as_dbl();
    else if (key == "beta_init") cfg.beta_init = as_dbl();
    else if (key == "rho") cfg.rho = as_dbl();
    else if (key == "lambda") cfg.lambda = as_dbl();
    else if (key == "q1") cfg.q1 = as_dbl();
    else if (key == "q2") cfg.q2 = as_dbl();
    else if (key == "zeta") cfg.zeta = as_dbl();
    else if (key == "design") cfg.design = value;
    else if (key == "design_q") cfg.design_q = as_dbl();
    else if (key == "lr") cfg.lr = as_dbl();
    else if (key == "lr_mult") cfg.lr_mult = as_dbl();
    else if (key == "train_every") cfg.train_every = as_int();
    else if (key == "updates_per_session") cfg.updates_per_session = as_int();
    else if (key == "root_seed") cfg.root_seed = as_u64();
    else if (key == "threads") cfg.threads = as_int();
    else if (key == "out_dir") cfg.out_dir = value;
    else throw std::invalid_argument("unknown config key: " + key);
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunResult run_single(const ExperimentConfig& cfg, std::uint64_t run_seed) {
    const ResolvedTask task = resolve_task(cfg);
    const MethodConfig method = MethodConfig::from_name(cfg.method);

    int input_dim = 0;
    int output_dim = 0;
    HeadKind head = HeadKind::Gaussian;
    int default_train_every = 16;
    switch (task.kind) {
        case TaskKind::Regression:
            input_dim = 1;
            output_dim = 2;
            head = HeadKind::Gaussian;
            default_train_every = 16;
            break;
        case TaskKind::Classification:
        case TaskKind::Switched:
            input_dim = 2;
            output_dim = task.grid_a.num_classes();
            head = HeadKind::Categorical;
            default_train_every = 32;
            break;
    }
    const int train_every = cfg.train_every > 0 ? cfg.train_every : default_train_every;
    const int cycles = cfg.cycles > 0 ? cfg.cycles : 5;

    std::vector<Sample> stream;
    switch (task.kind) {
        case TaskKind::Regression:
            stream = gen_regression_stream(task.sine, derive_seed(run_seed, 0x57ea), cycles);
            break;
        case TaskKind::Classification:
            stream = gen_classification_stream(task.grid_a, derive_seed(run_seed, 0x57ea), cycles);
            break;
        case TaskKind::Switched:
            stream = gen_switched_stream(task.grid_a, task.grid_b, derive_seed(run_seed, 0x57ea),
                                         cycles);
            break;
    }
    if (cfg.max_points > 0 && static_cast<std::int64_t>(stream.size()) > cfg.max_points) {
        stream.resize(static_cast<std::size_t>(cfg.max_points));
    }

    Mlp model = Mlp::make_default(input_dim, output_dim);
    auto init_rng = make_rng(derive_seed(run_seed, 0x1a17));
    model.init_xavier(init_rng);
    MomentOptimizer opt(model.param_count(), cfg.lr);
    auto loop_rng = make_rng(derive_seed(run_seed, 0x100b));

    FifoBuffer fifo(cfg.n_fifo);
    PluralStack stack(stack_config(cfg));
    AdaptiveWeights weights = AdaptiveWeights::from_initial(cfg.alpha_init, cfg.beta_init, cfg.rho,
                                                            cfg.lambda, cfg.lr_mult);

    RunResult result;
    std::int64_t next_id = 0;
    std::int64_t step = 0;
    Mlp::Workspace ws = model.make_workspace();
    for (std::size_t i = 0; i < stream.size(); ++i) {
        Record rec;
        rec.id = next_id++;
        rec.x = stream[i].x;
        rec.y = stream[i].y;
        if (auto evicted = fifo.push(std::move(rec))) {
            // the stored feature is captured with the model as of the moment
            // the record leaves the FIFO stage
            model.forward(evicted->x, ws);
            evicted->z = ws.act.back();
            stack.offer(std::move(*evicted), loop_rng);
        }

        if ((i + 1) % static_cast<std::size_t>(train_every) == 0) {
            const std::int64_t available = static_cast<std::int64_t>(fifo.size()) / cfg.batch;
            const std::int64_t n_steps = std::min<std::int64_t>(cfg.updates_per_session, available);
            for (std::int64_t s = 0; s < n_steps; ++s) {
                StepReport rep = training_step(model, opt, fifo, stack, weights, method, head,
                                               cfg.batch, loop_rng);
                if (cfg.keep_series) result.series.push_back({step, rep});
                ++step;
            }
        }
    }

    switch (task.kind) {
        case TaskKind::Regression:
            result.final_metric = eval_kld(model, task.sine);
            break;
        case TaskKind::Classification:
            result.final_metric = eval_acc(model, task.grid_a);
            break;
        case TaskKind::Switched:
            result.final_metric = eval_acc(model, task.grid_a);
            result.second_metric = eval_acc(model, task.grid_b);
            break;
    }
    result.feature_miss = stack.feature_miss_count();
    for (const auto& c : stack.counters()) result.omission_drops += c.omission_drops;
    return result;
}

double rank_weighted_mean(std::vector<double> values, bool larger_is_better) {
    if (values.empty()) throw std::invalid_argument("rank_weighted_mean of empty sample");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // worst first; stable so ties keep seed order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return larger_is_better ? values[a] < values[b] : values[a] > values[b];
    });
    const double s = static_cast<double>(values.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const double w = s - static_cast<double>(pos);  // worst gets S, best gets 1
        num += w * values[order[pos]];
        den += w;
    }
    return num / den;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds < 1) throw std::invalid_argument("need at least one seed");
    const TaskKind kind = task_kind_for_name(cfg.task);

    std::vector<RunResult> results(static_cast<std::size_t>(cfg.seeds));
    parallel_for(cfg.seeds, cfg.threads, [&](std::int64_t k) {
        results[static_cast<std::size_t>(k)] =
            run_single(cfg, derive_seed(cfg.root_seed, 0x5eed, static_cast<std::uint64_t>(k)));
    });

    ExperimentSummary summary;
    summary.larger_is_better = kind != TaskKind::Regression;
    for (const auto& r : results) {
        summary.per_seed.push_back(r.final_metric);
        if (r.second_metric) summary.per_seed_second.push_back(*r.second_metric);
    }
    summary.rank_weighted = rank_weighted_mean(summary.per_seed, summary.larger_is_better);

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        std::ofstream(fs::path(cfg.out_dir) / "config.json") << cfg.to_json() << "\n";

        {
            const ResolvedTask task = resolve_task(cfg);
            std::ofstream task_out(fs::path(cfg.out_dir) / "task.json");
            if (task.kind == TaskKind::Regression) {
                task_out << snapshot_json(task.sine) << "\n";
            } else if (task.kind == TaskKind::Classification) {
                task_out << snapshot_json(task.grid_a) << "\n";
            } else {
                task_out << "[" << snapshot_json(task.grid_a) << ","
                         << snapshot_json(task.grid_b) << "]\n";
            }
        }

        if (cfg.keep_series) {
            for (int k = 0; k < cfg.seeds; ++k) {
                std::ofstream out(fs::path(cfg.out_dir) /
                                  ("seed_" + std::to_string(k) + "_series.csv"));
                out << StepReport::csv_header() << "\n";
                for (const auto& row : results[static_cast<std::size_t>(k)].series) {
                    out << row.report.csv_row(row.step) << "\n";
                }
            }
        }

        // badness rank and weight per seed make the aggregation auditable
        std::vector<std::size_t> order(results.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return summary.larger_is_better ? summary.per_seed[a] < summary.per_seed[b]
                                            : summary.per_seed[a] > summary.per_seed[b];
        });
        std::vector<int> rank(results.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            rank[order[pos]] = static_cast<int>(pos) + 1;  // 1 = worst
        }
        std::ofstream out(fs::path(cfg.out_dir) / "summary.csv");
        out << "seed,value,value_second,badness_rank,weight\n";
        for (std::size_t k = 0; k < results.size(); ++k) {
            out << k << "," << format_double(summary.per_seed[k]) << ",";
            if (results[k].second_metric) out << format_double(*results[k].second_metric);
            out << "," << rank[k] << "," << (static_cast<int>(results.size()) - rank[k] + 1)
                << "\n";
        }
        out << "rank_weighted_mean," << format_double(summary.rank_weighted) << ",";
        if (!summary.per_seed_second.empty()) {
            out << format_double(
                rank_weighted_mean(summary.per_seed_second, summary.larger_is_better));
        }
        out << ",,\n";
    }
    return summary;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "rho") return SweepAxis::Rho;
    if (name == "q") return SweepAxis::Q;
    if (name == "design") return SweepAxis::Design;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

namespace {

std::vector<double> q_grid_for(CounterKind kind, int points) {
    double lo = 0.0;
    double hi = 0.0;
    switch (kind) {
        case CounterKind::QLog: hi = 2.0; break;
        case CounterKind::Linear: hi = 0.95; break;  // open domain at 1
        case CounterKind::Exp: hi = 1.0; break;
    }
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return grid;
}

std::string axis_dir(const std::string& base, const std::string& label) {
    if (base.empty()) return {};
    std::string clean = label;
    for (char& c : clean) {
        if (c == '=' || c == ' ') c = '_';
    }
    return (std::filesystem::path(base) / clean).string();
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                double balance_threshold, int grid_points) {
    std::vector<SweepRow> rows;
    const auto run_one = [&](ExperimentConfig cfg, const std::string& label, double value) {
        cfg.out_dir = axis_dir(base.out_dir, label);
        ExperimentSummary s = run_experiment(cfg);
        SweepRow row;
        row.label = label;
        row.value = value;
        row.seeds = cfg.seeds;
        row.aggregate = s.rank_weighted;
        if (!s.per_seed_second.empty()) {
            row.aggregate_second = rank_weighted_mean(s.per_seed_second, s.larger_is_better);
            for (std::size_t k = 0; k < s.per_seed.size(); ++k) {
                if (s.per_seed[k] >= balance_threshold &&
                    s.per_seed_second[k] >= balance_threshold) {
                    ++row.balanced_seeds;
                }
            }
        }
        rows.push_back(std::move(row));
    };

    switch (axis) {
        case SweepAxis::Rho:
            for (double rho : {0.25, 0.5, 0.75}) {
                ExperimentConfig cfg = base;
                cfg.rho = rho;
                run_one(cfg, "rho=" + std::to_string(rho).substr(0, 4), rho);
            }
            break;
        case SweepAxis::Q: {
            const CounterKind kind = counter_kind_from_name(base.design);
            for (double q : q_grid_for(kind, grid_points)) {
                ExperimentConfig cfg = base;
                cfg.buffer = "custom";
                cfg.design_q = q;
                char label[48];
                std::snprintf(label, sizeof(label), "%s q=%.4g", base.design.c_str(), q);
                run_one(cfg, label, q);
            }
            break;
        }
        case SweepAxis::Design:
            for (const char* design : {"lin", "exp", "qlog"}) {
                const CounterKind kind = counter_kind_from_name(design);
                for (double q : q_grid_for(kind, grid_points)) {
                    ExperimentConfig cfg = base;
                    cfg.buffer = "custom";
                    cfg.design = design;
                    cfg.design_q = q;
                    char label[48];
                    std::snprintf(label, sizeof(label), "%s q=%.4g", design, q);
                    run_one(cfg, label, q);
                }
            }
            break;
    }

    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        std::ofstream out(std::filesystem::path(base.out_dir) / "sweep_summary.csv");
        out << "label,value,aggregate,aggregate_second,balanced_seeds,seeds\n";
        for (const auto& r : rows) {
            out << r.label << "," << format_double(r.value) << "," << format_double(r.aggregate)
                << "," << format_double(r.aggregate_second) << "," << r.balanced_seeds << ","
                << r.seeds << "\n";
        }
    }
    return rows;
}

}  // namespace a2er
