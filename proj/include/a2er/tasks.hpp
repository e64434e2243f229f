#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "a2er/mlp.hpp"

namespace a2er {

struct Sample {
    std::vector<double> x;
    std::vector<double> y;
};

struct SineComponent {
    double amplitude;
    double frequency;
    double phase;
};

// 1-D regression target: a composite of up to seven sine waves, swept over
// [-2.5, 2.5] in 0.001 increments with Gaussian label noise.
struct SineMixtureTask {
    std::vector<SineComponent> components;
    double noise_sd = 0.1;
    double x_min = -2.5;
    double x_max = 2.5;
    double x_step = 0.001;

    double mean_at(double x) const;
    int points_per_cycle() const;  // 5000

    static SineMixtureTask generate(std::uint64_t task_seed);
};

// 2-D classification target: Gaussian-mixture components on [-1, 1]^2; a point
// farther than 0.3 from every mean is labeled as the extra outlier class.
struct GaussianGridTask {
    std::vector<std::array<double, 2>> means;
    double threshold_sq = 0.09;  // 0.3^2
    double grid_step = 0.02;
    double noise_sd = 0.01;
    double lo = -1.0;
    double hi = 1.0;

    int cells_per_axis() const;          // 100
    int points_per_cycle() const;        // 10000
    int outlier_index() const { return static_cast<int>(means.size()); }
    int num_classes() const { return static_cast<int>(means.size()) + 1; }

    // Nearest component when within the threshold (boundary inclusive, ties to
    // the lowest index), otherwise the outlier index.
    int true_label(double x0, double x1) const;

    static GaussianGridTask generate(std::uint64_t task_seed);
    static GaussianGridTask generate_with_count(std::uint64_t task_seed, int count);
};

struct StreamSchedule {
    int cycles = 5;
    int train_every = 16;        // 16 for regression, 32 for classification
    int updates_per_session = 16;
};

// All streams are pure functions of (task, seed): same inputs, same sequence.
std::vector<Sample> gen_regression_stream(const SineMixtureTask& task, std::uint64_t seed,
                                          int cycles);
std::vector<Sample> gen_classification_stream(const GaussianGridTask& task, std::uint64_t seed,
                                              int cycles);
// cycles_each of task A followed by cycles_each of task B; the tasks must
// share grid geometry and class count.
std::vector<Sample> gen_switched_stream(const GaussianGridTask& a, const GaussianGridTask& b,
                                        std::uint64_t seed, int cycles_each);

// Summed KL divergence from the true output distribution to the predicted one
// over the noiseless sweep grid.
double eval_kld(const Mlp& model, const SineMixtureTask& task);
double eval_kld_fn(const std::function<std::pair<double, double>(double)>& predict,
                   const SineMixtureTask& task);

// Percentage of noiseless grid cells whose argmax class matches the oracle.
double eval_acc(const Mlp& model, const GaussianGridTask& task);
double eval_acc_fn(const std::function<int(double, double)>& predict,
                   const GaussianGridTask& task);

}  // namespace a2er
