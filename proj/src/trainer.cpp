#include "a2er/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace a2er {

MethodConfig MethodConfig::from_name(const std::string& name) {
    if (name == "DER") return {false, false, false, false};
    if (name == "-Aa") return {false, true, true, true};
    if (name == "-Ab") return {true, false, true, true};
    if (name == "-B") return {true, true, false, true};
    if (name == "-C") return {true, true, true, false};
    if (name == "A2ER") return {true, true, true, true};
    throw std::invalid_argument("unknown method: " + name);
}

std::string MethodConfig::name() const {
    if (adapt_alpha && adapt_beta && block && correction) return "A2ER";
    if (!adapt_alpha && !adapt_beta && !block && !correction) return "DER";
    if (!adapt_alpha) return "-Aa";
    if (!adapt_beta) return "-Ab";
    if (!block) return "-B";
    if (!correction) return "-C";
    return "custom";
}

std::string StepReport::csv_header() {
    return "step,loss_fifo,loss_rs,reg_mean,alpha,beta,delta_q,n_corrected,"
           "blocked_weight_mass,feature_miss,uniform_fallback,aborted";
}

std::string StepReport::csv_row(std::int64_t step) const {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d,%d,%d",
                  static_cast<long long>(step), loss_fifo, loss_rs, reg_mean, alpha, beta, delta_q,
                  n_corrected, blocked_weight_mass, feature_miss, uniform_fallback ? 1 : 0,
                  aborted ? 1 : 0);
    return buf;
}

namespace {

// Uniform sample of `count` distinct FIFO positions (partial Fisher-Yates).
std::vector<std::size_t> sample_fifo_indices(std::size_t size, std::size_t count,
                                             std::mt19937_64& rng) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t take = std::min(count, size);
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, size - 1);
        std::swap(idx[i], idx[dist(rng)]);
    }
    idx.resize(take);
    return idx;
}

}  // namespace

StepReport training_step(Mlp& model, MomentOptimizer& opt, FifoBuffer& fifo, PluralStack& stack,
                         AdaptiveWeights& weights, const MethodConfig& method, HeadKind head,
                         int batch_size, std::mt19937_64& rng) {
    StepReport report;
    const double alpha = weights.alpha();
    const double beta = weights.beta();
    report.alpha = alpha;
    report.beta = beta;

    // 1. streaming batch + two disjoint replay halves
    const auto fifo_idx = sample_fifo_indices(fifo.size(), static_cast<std::size_t>(batch_size), rng);
    ReplaySample replay = stack.sample_replay(batch_size, rng);
    report.uniform_fallback = replay.uniform_fallback;

    Mlp::Workspace ws = model.make_workspace();
    std::vector<double> grad(model.param_count(), 0.0);
    std::vector<double> dz(static_cast<std::size_t>(model.output_dim()), 0.0);

    // 2. regularization half: raw feature errors and correction rates under
    // the current threshold (all treated as constants for every gradient)
    const std::size_t n_reg = replay.regularization.size();
    std::vector<double> raw_deltas(n_reg, 0.0);
    std::vector<double> etas(n_reg, 1.0);
    std::vector<double> gammas(n_reg, 0.0);
    std::vector<std::vector<double>> reg_h(n_reg);
    for (std::size_t i = 0; i < n_reg; ++i) {
        const Record& rec = replay.regularization[i].rec;
        model.forward(rec.x, ws);
        reg_h[i] = ws.act.back();
        if (rec.z.size() != reg_h[i].size()) {
            throw std::invalid_argument("stored feature dimension mismatch");
        }
        double d = 0.0;
        for (std::size_t j = 0; j < reg_h[i].size(); ++j) {
            const double diff = reg_h[i][j] - rec.z[j];
            d += diff * diff;
        }
        raw_deltas[i] = 0.5 * d;
        if (method.needs_threshold()) {
            etas[i] = compute_eta(raw_deltas[i], weights.delta_q, weights.rho);
            gammas[i] = compute_gamma(raw_deltas[i], etas[i], weights.delta_q);
        }
    }

    // 3. block + correction write-back
    if (method.block || method.correction) {
        double blocked_mass = 0.0;
        for (std::size_t i = 0; i < n_reg; ++i) {
            ReplayItem& item = replay.regularization[i];
            std::vector<double> z_new = item.rec.z;
            double gb_new = item.rec.gamma_bar;
            if (method.correction && gammas[i] > 0.0) {
                correct_feature(z_new, reg_h[i], gammas[i]);
                ++report.n_corrected;
            }
            if (method.block) {
                gb_new = update_priority(gb_new, gammas[i], weights.lambda);
            }
            if (!stack.update_feature(item.layer, item.rec.id, z_new, gb_new)) {
                ++report.feature_miss;
            }
            blocked_mass += 1.0 - gb_new;
        }
        if (n_reg > 0) report.blocked_weight_mass = blocked_mass / static_cast<double>(n_reg);
    }

    // 4. threshold EMA on the raw (pre-correction) errors
    if (method.needs_threshold() && n_reg > 0) {
        weights.update_delta_q(raw_deltas, static_cast<int>(n_reg), stack.total_capacity());
    }
    report.delta_q = weights.delta_q;

    // 5. assemble the loss and its parameter gradient
    double loss_fifo = 0.0;
    if (!fifo_idx.empty()) {
        const double scale = (1.0 - beta) / static_cast<double>(fifo_idx.size());
        for (std::size_t i : fifo_idx) {
            const Record& rec = fifo.at(i);
            model.forward(rec.x, ws);
            loss_fifo += nll(head, ws.act.back(), rec.y);
            nll_grad(head, ws.act.back(), rec.y, dz);
            for (double& v : dz) v *= scale;
            model.backward(ws, dz, grad);
        }
        loss_fifo /= static_cast<double>(fifo_idx.size());
    }
    report.loss_fifo = loss_fifo;

    double loss_rs = 0.0;
    if (!replay.rehearsal.empty()) {
        const double scale = beta / static_cast<double>(replay.rehearsal.size());
        for (const ReplayItem& item : replay.rehearsal) {
            model.forward(item.rec.x, ws);
            loss_rs += nll(head, ws.act.back(), item.rec.y);
            nll_grad(head, ws.act.back(), item.rec.y, dz);
            for (double& v : dz) v *= scale;
            model.backward(ws, dz, grad);
        }
        loss_rs /= static_cast<double>(replay.rehearsal.size());
    }
    report.loss_rs = loss_rs;

    double reg_mean = 0.0;
    double compensated_constraint = 0.0;  // mean eta * (delta - delta_q), for the alpha rule
    if (n_reg > 0) {
        const double inv = 1.0 / static_cast<double>(n_reg);
        for (std::size_t i = 0; i < n_reg; ++i) {
            const Record& rec = replay.regularization[i].rec;
            const double w = method.correction ? (1.0 - gammas[i]) * (1.0 - gammas[i]) : 1.0;
            reg_mean += w * raw_deltas[i] * inv;
            const double comp = method.correction ? etas[i] * (raw_deltas[i] - weights.delta_q)
                                                  : (raw_deltas[i] - weights.delta_q);
            compensated_constraint += comp * inv;

            model.forward(rec.x, ws);  // same parameters as step 2; recompute h
            const double s = alpha * w * inv;
            for (std::size_t j = 0; j < dz.size(); ++j) {
                dz[j] = s * (reg_h[i][j] - rec.z[j]);
            }
            model.backward(ws, dz, grad);
        }
    }
    report.reg_mean = reg_mean;

    const double total_loss = (1.0 - beta) * loss_fifo + beta * loss_rs + alpha * reg_mean;
    if (!std::isfinite(total_loss)) {
        report.aborted = true;
        return report;
    }

    // 6. simultaneous updates: model parameters and multiplier pre-images,
    // both computed from the pre-update values
    if (!opt.step(model.params(), grad)) {
        report.aborted = true;
        return report;
    }
    const auto [g_beta, g_alpha] = multiplier_gradients(loss_fifo, loss_rs, compensated_constraint);
    const bool update_alpha = method.adapt_alpha && n_reg > 0;
    const bool update_beta = method.adapt_beta && !replay.rehearsal.empty() && !fifo_idx.empty();
    weights.apply_multiplier_gradients(update_alpha ? g_alpha : 0.0, update_beta ? g_beta : 0.0);
    return report;
}

}  // namespace a2er
