#include "a2er/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "a2er/heads.hpp"
#include "a2er/rng.hpp"

namespace a2er {

double SineMixtureTask::mean_at(double x) const {
    double s = 0.0;
    for (const SineComponent& c : components) {
        s += c.amplitude * std::sin(c.frequency * x + c.phase);
    }
    return s;
}

int SineMixtureTask::points_per_cycle() const {
    return static_cast<int>(std::llround((x_max - x_min) / x_step));
}

SineMixtureTask SineMixtureTask::generate(std::uint64_t task_seed) {
    auto rng = make_rng(derive_seed(task_seed, 0x51aE));
    SineMixtureTask task;
    // five to seven waves: rich enough that early features matter downstream
    std::uniform_int_distribution<int> count_dist(5, 7);
    const int count = count_dist(rng);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < count; ++i) {
        task.components.push_back({amp(rng), freq(rng), phase(rng)});
    }
    return task;
}

int GaussianGridTask::cells_per_axis() const {
    return static_cast<int>(std::llround((hi - lo) / grid_step));
}

int GaussianGridTask::points_per_cycle() const {
    const int n = cells_per_axis();
    return n * n;
}

int GaussianGridTask::true_label(double x0, double x1) const {
    int best = outlier_index();
    double best_d = threshold_sq;
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double d0 = x0 - means[i][0];
        const double d1 = x1 - means[i][1];
        const double d = d0 * d0 + d1 * d1;
        if (d < best_d || (d == best_d && static_cast<int>(i) < best)) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

GaussianGridTask GaussianGridTask::generate(std::uint64_t task_seed) {
    auto rng = make_rng(derive_seed(task_seed, 0x6155));
    std::uniform_int_distribution<int> count_dist(8, 16);
    return generate_with_count(task_seed, count_dist(rng));
}

GaussianGridTask GaussianGridTask::generate_with_count(std::uint64_t task_seed, int count) {
    if (count < 1 || count > 16) throw std::invalid_argument("component count must lie in [1, 16]");
    auto rng = make_rng(derive_seed(task_seed, 0x6e5));
    GaussianGridTask task;
    std::uniform_real_distribution<double> coord(-0.8, 0.8);
    const double min_sep_sq = 0.25 * 0.25;
    int attempts = 0;
    while (static_cast<int>(task.means.size()) < count) {
        const double c0 = coord(rng);
        const double c1 = coord(rng);
        bool ok = true;
        for (const auto& m : task.means) {
            const double d0 = c0 - m[0];
            const double d1 = c1 - m[1];
            if (d0 * d0 + d1 * d1 < min_sep_sq) {
                ok = false;
                break;
            }
        }
        if (ok) {
            task.means.push_back({c0, c1});
            attempts = 0;
        } else if (++attempts > 10000) {
            // restart the layout; dense draws can paint themselves into a corner
            task.means.clear();
            attempts = 0;
        }
    }
    return task;
}

std::vector<Sample> gen_regression_stream(const SineMixtureTask& task, std::uint64_t seed,
                                          int cycles) {
    auto rng = make_rng(derive_seed(seed, 0x5712ea7));
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = task.points_per_cycle();
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(cycles));
    for (int c = 0; c < cycles; ++c) {
        for (int i = 0; i < n; ++i) {
            const double x = task.x_min + task.x_step * static_cast<double>(i);
            const double y = task.mean_at(x) + task.noise_sd * noise(rng);
            out.push_back({{x}, {y}});
        }
    }
    return out;
}

std::vector<Sample> gen_classification_stream(const GaussianGridTask& task, std::uint64_t seed,
                                              int cycles) {
    auto rng = make_rng(derive_seed(seed, 0x5712eb8));
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = task.cells_per_axis();
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) *
                static_cast<std::size_t>(cycles));
    for (int c = 0; c < cycles; ++c) {
        // raster scan over cell centers; the label comes from the clean point
        for (int i = 0; i < n; ++i) {
            const double cx = task.lo + task.grid_step * (static_cast<double>(i) + 0.5);
            for (int j = 0; j < n; ++j) {
                const double cy = task.lo + task.grid_step * (static_cast<double>(j) + 0.5);
                const int label = task.true_label(cx, cy);
                const double nx = cx + task.noise_sd * noise(rng);
                const double ny = cy + task.noise_sd * noise(rng);
                out.push_back({{nx, ny}, {static_cast<double>(label)}});
            }
        }
    }
    return out;
}

std::vector<Sample> gen_switched_stream(const GaussianGridTask& a, const GaussianGridTask& b,
                                        std::uint64_t seed, int cycles_each) {
    if (a.num_classes() != b.num_classes() || a.cells_per_axis() != b.cells_per_axis()) {
        throw std::invalid_argument("switched tasks must share grid geometry and class count");
    }
    auto out = gen_classification_stream(a, derive_seed(seed, 1), cycles_each);
    auto second = gen_classification_stream(b, derive_seed(seed, 2), cycles_each);
    out.insert(out.end(), std::make_move_iterator(second.begin()),
               std::make_move_iterator(second.end()));
    return out;
}

double eval_kld_fn(const std::function<std::pair<double, double>(double)>& predict,
                   const SineMixtureTask& task) {
    const int n = task.points_per_cycle();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = task.x_min + task.x_step * static_cast<double>(i);
        const auto [mu, sigma] = predict(x);
        total += kld_gaussian(task.mean_at(x), task.noise_sd, mu, sigma);
    }
    return total;
}

double eval_kld(const Mlp& model, const SineMixtureTask& task) {
    Mlp::Workspace ws = model.make_workspace();
    const int n = task.points_per_cycle();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = task.x_min + task.x_step * static_cast<double>(i);
        const double xv[1] = {x};
        model.forward(xv, ws);
        const double mu = ws.act.back()[0];
        const double sigma = std::exp(ws.act.back()[1]);
        total += kld_gaussian(task.mean_at(x), task.noise_sd, mu, sigma);
    }
    return total;
}

double eval_acc_fn(const std::function<int(double, double)>& predict,
                   const GaussianGridTask& task) {
    const int n = task.cells_per_axis();
    std::int64_t hits = 0;
    for (int i = 0; i < n; ++i) {
        const double cx = task.lo + task.grid_step * (static_cast<double>(i) + 0.5);
        for (int j = 0; j < n; ++j) {
            const double cy = task.lo + task.grid_step * (static_cast<double>(j) + 0.5);
            if (predict(cx, cy) == task.true_label(cx, cy)) ++hits;
        }
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(n) / static_cast<double>(n);
}

double eval_acc(const Mlp& model, const GaussianGridTask& task) {
    Mlp::Workspace ws = model.make_workspace();
    const int n = task.cells_per_axis();
    std::int64_t hits = 0;
    for (int i = 0; i < n; ++i) {
        const double cx = task.lo + task.grid_step * (static_cast<double>(i) + 0.5);
        for (int j = 0; j < n; ++j) {
            const double cy = task.lo + task.grid_step * (static_cast<double>(j) + 0.5);
            const double xv[2] = {cx, cy};
            model.forward(xv, ws);
            const auto& z = ws.act.back();
            const int pred = static_cast<int>(
                std::max_element(z.begin(), z.end()) - z.begin());
            if (pred == task.true_label(cx, cy)) ++hits;
        }
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(n) / static_cast<double>(n);
}

}  // namespace a2er
