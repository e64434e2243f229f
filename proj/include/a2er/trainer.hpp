#pragma once

#include <random>
#include <string>

#include "a2er/adaptive.hpp"
#include "a2er/fifo_buffer.hpp"
#include "a2er/heads.hpp"
#include "a2er/mlp.hpp"
#include "a2er/optimizer.hpp"
#include "a2er/plural_stack.hpp"

namespace a2er {

// Which mechanisms are active. The named presets differ from the full method
// by exactly one switch each; DER is the fixed-weight baseline.
struct MethodConfig {
    bool adapt_alpha = true;
    bool adapt_beta = true;
    bool block = true;
    bool correction = true;

    // "DER", "-Aa", "-Ab", "-B", "-C", "A2ER"
    static MethodConfig from_name(const std::string& name);
    std::string name() const;

    bool needs_threshold() const { return adapt_alpha || block || correction; }
};

struct StepReport {
    double loss_fifo = 0.0;
    double loss_rs = 0.0;    // rehearsal-half NLL
    double reg_mean = 0.0;   // mean compensated feature error, before the alpha weight
    double alpha = 0.0;
    double beta = 0.0;
    double delta_q = 0.0;
    int n_corrected = 0;              // records whose stored feature moved
    double blocked_weight_mass = 0.0; // mean (1 - gamma_bar) over the regularization half
    int feature_miss = 0;
    bool uniform_fallback = false;
    bool aborted = false;  // non-finite loss; no parameter update happened

    static std::string csv_header();
    std::string csv_row(std::int64_t step) const;
};

// One combined update: FIFO batch for the streaming loss, two disjoint replay
// halves for rehearsal and feature regularization, threshold/priority/feature
// maintenance, then one optimizer step on the model and one mirror-descent
// step on the multipliers.
StepReport training_step(Mlp& model, MomentOptimizer& opt, FifoBuffer& fifo, PluralStack& stack,
                         AdaptiveWeights& weights, const MethodConfig& method, HeadKind head,
                         int batch_size, std::mt19937_64& rng);

}  // namespace a2er
