#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "a2er/experiment.hpp"
#include "a2er/probe.hpp"

namespace {

void add_config_options(CLI::App* cmd, a2er::ExperimentConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--method", cfg.method, "DER | -Aa | -Ab | -B | -C | A2ER");
    cmd->add_option("--buffer", cfg.buffer, "RS | Q2S | P2S | O2S");
    cmd->add_option("--task", cfg.task, "r1..r4 | c1..c4 | s1..s4");
    cmd->add_option("--task-seed", cfg.task_seed, "override the named task's generator seed");
    cmd->add_option("--seeds", cfg.seeds, "number of run seeds");
    cmd->add_option("--cycles", cfg.cycles, "stream cycles (0 = task default)");
    cmd->add_option("--max-points", cfg.max_points, "truncate the stream (0 = full)");
    cmd->add_option("--n-fifo", cfg.n_fifo);
    cmd->add_option("--n-rs", cfg.n_rs);
    cmd->add_option("--batch", cfg.batch);
    cmd->add_option("--alpha-init", cfg.alpha_init);
    cmd->add_option("--beta-init", cfg.beta_init);
    cmd->add_option("--rho", cfg.rho);
    cmd->add_option("--lambda", cfg.lambda);
    cmd->add_option("--q1", cfg.q1);
    cmd->add_option("--q2", cfg.q2);
    cmd->add_option("--zeta", cfg.zeta);
    cmd->add_option("--design", cfg.design, "counter design for sweeps: qlog | lin | exp");
    cmd->add_option("--design-q", cfg.design_q);
    cmd->add_option("--lr", cfg.lr);
    cmd->add_option("--lr-mult", cfg.lr_mult);
    cmd->add_option("--train-every", cfg.train_every, "0 = task default");
    cmd->add_option("--updates-per-session", cfg.updates_per_session);
    cmd->add_option("--root-seed", cfg.root_seed);
    cmd->add_option("--threads", cfg.threads, "0 = hardware concurrency");
    cmd->add_option("--out", cfg.out_dir, "output directory for CSV/JSON artifacts");
}

a2er::ExperimentConfig finalize_config(const a2er::ExperimentConfig& cli_values,
                                       const std::string& config_path, CLI::App* cmd) {
    if (config_path.empty()) return cli_values;
    // file first, then explicit command-line overrides on top
    a2er::ExperimentConfig cfg = a2er::load_config_file(config_path);
    a2er::ExperimentConfig merged = cfg;
    auto keep = [&](const std::string& flag, auto member) {
        if (cmd->count(flag) > 0) merged.*member = cli_values.*member;
    };
    keep("--method", &a2er::ExperimentConfig::method);
    keep("--buffer", &a2er::ExperimentConfig::buffer);
    keep("--task", &a2er::ExperimentConfig::task);
    keep("--task-seed", &a2er::ExperimentConfig::task_seed);
    keep("--seeds", &a2er::ExperimentConfig::seeds);
    keep("--cycles", &a2er::ExperimentConfig::cycles);
    keep("--max-points", &a2er::ExperimentConfig::max_points);
    keep("--n-fifo", &a2er::ExperimentConfig::n_fifo);
    keep("--n-rs", &a2er::ExperimentConfig::n_rs);
    keep("--batch", &a2er::ExperimentConfig::batch);
    keep("--alpha-init", &a2er::ExperimentConfig::alpha_init);
    keep("--beta-init", &a2er::ExperimentConfig::beta_init);
    keep("--rho", &a2er::ExperimentConfig::rho);
    keep("--lambda", &a2er::ExperimentConfig::lambda);
    keep("--q1", &a2er::ExperimentConfig::q1);
    keep("--q2", &a2er::ExperimentConfig::q2);
    keep("--zeta", &a2er::ExperimentConfig::zeta);
    keep("--design", &a2er::ExperimentConfig::design);
    keep("--design-q", &a2er::ExperimentConfig::design_q);
    keep("--lr", &a2er::ExperimentConfig::lr);
    keep("--lr-mult", &a2er::ExperimentConfig::lr_mult);
    keep("--train-every", &a2er::ExperimentConfig::train_every);
    keep("--updates-per-session", &a2er::ExperimentConfig::updates_per_session);
    keep("--root-seed", &a2er::ExperimentConfig::root_seed);
    keep("--threads", &a2er::ExperimentConfig::threads);
    keep("--out", &a2er::ExperimentConfig::out_dir);
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continual-learning replay engine: adaptive replay training, "
                 "generalized reservoir buffers, and buffer-probability probes"};
    app.require_subcommand(1);

    a2er::ExperimentConfig run_cfg;
    std::string run_config_path;
    CLI::App* run = app.add_subcommand("run", "train one method/buffer condition over seeds");
    add_config_options(run, run_cfg, run_config_path);

    a2er::ExperimentConfig sweep_cfg;
    std::string sweep_config_path;
    std::string axis = "rho";
    double balance_threshold = 90.0;
    int grid_points = 21;
    CLI::App* sweep = app.add_subcommand("sweep", "sweep rho, a counter q grid, or the designs");
    sweep->add_option("--axis", axis, "rho | q | design")->required();
    sweep->add_option("--balance-threshold", balance_threshold,
                      "half-accuracy bar for balanced switched runs");
    sweep->add_option("--grid-points", grid_points, "points in the q grid");
    add_config_options(sweep, sweep_cfg, sweep_config_path);

    std::string probe_design = "qlog";
    double probe_q = 1.0;
    std::int64_t probe_capacity = 512;
    std::int64_t probe_offers = 5000;
    std::int64_t probe_mark = 0;
    std::int64_t probe_trials = 20000;
    std::int64_t probe_stride = 1;
    std::uint64_t probe_seed = 42;
    int probe_threads = 0;
    std::string probe_out;
    CLI::App* probe = app.add_subcommand("probe", "acceptance/retention tables and Monte Carlo checks");
    probe->add_option("--design", probe_design, "qlog | lin | exp");
    probe->add_option("--q", probe_q);
    probe->add_option("--capacity", probe_capacity);
    probe->add_option("--offers", probe_offers, "stream length for the curve / membership probe");
    probe->add_option("--mark", probe_mark, "token position to probe empirically (0 = skip)");
    probe->add_option("--trials", probe_trials);
    probe->add_option("--stride", probe_stride, "row stride of the acceptance curve");
    probe->add_option("--seed", probe_seed);
    probe->add_option("--threads", probe_threads);
    probe->add_option("--out", probe_out, "output directory for probe CSVs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = finalize_config(run_cfg, run_config_path, run);
            const auto summary = a2er::run_experiment(cfg);
            std::cout << cfg.method << "/" << cfg.buffer << " on " << cfg.task << ": rank-weighted "
                      << (summary.larger_is_better ? "ACC" : "KLD") << " = "
                      << summary.rank_weighted << " over " << cfg.seeds << " seeds\n";
        } else if (sweep->parsed()) {
            const auto cfg = finalize_config(sweep_cfg, sweep_config_path, sweep);
            const auto rows =
                a2er::run_sweep(cfg, a2er::sweep_axis_from_name(axis), balance_threshold, grid_points);
            for (const auto& r : rows) {
                std::cout << r.label << ": aggregate = " << r.aggregate;
                if (r.aggregate_second != 0.0) {
                    std::cout << ", second half = " << r.aggregate_second
                              << ", balanced seeds = " << r.balanced_seeds << "/" << r.seeds;
                }
                std::cout << "\n";
            }
        } else if (probe->parsed()) {
            const a2er::CounterDesign design{a2er::counter_kind_from_name(probe_design), probe_q};
            const auto curve =
                a2er::acceptance_curve(design, probe_capacity, probe_offers, probe_stride);
            if (!probe_out.empty()) {
                std::filesystem::create_directories(probe_out);
                std::ofstream out(std::filesystem::path(probe_out) / "acceptance_curve.csv");
                out << "n,acceptance_probability\n";
                for (const auto& [n, p] : curve) out << n << "," << p << "\n";
            }
            std::cout << "acceptance curve: " << curve.size() << " rows (design " << probe_design
                      << ", q = " << probe_q << ", capacity = " << probe_capacity << ")\n";
            if (probe_mark > 0) {
                const auto res = a2er::empirical_membership(design, probe_capacity, probe_offers,
                                                            probe_mark, probe_trials, probe_seed,
                                                            probe_threads);
                std::cout << "membership of offer #" << probe_mark << " after " << probe_offers
                          << " offers: empirical " << res.empirical << ", analytic "
                          << res.analytic << ", z = " << res.z_score << " (" << res.trials
                          << " trials)\n";
                if (!probe_out.empty()) {
                    std::ofstream out(std::filesystem::path(probe_out) / "membership_probe.csv");
                    out << "mark,offers,empirical,analytic,trials,z_score\n";
                    out << probe_mark << "," << probe_offers << "," << res.empirical << ","
                        << res.analytic << "," << res.trials << "," << res.z_score << "\n";
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
