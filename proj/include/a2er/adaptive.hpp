#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace a2er {

double softplus(double x);
double softplus_inv(double y);
double sigmoid(double x);

// Linear-interpolation quantile of an unsorted sample; rho in (0, 1).
double interpolated_quantile(std::vector<double> values, double rho);

// eta in [0, 1]: how close the raw feature error delta_tau is to the running
// threshold delta_q, measured against the empirical maximum
// delta_q_bar = delta_q * (1 + (1 - rho) / rho). Returns 1 when delta_q = 0.
double compute_eta(double delta_tau, double delta_q, double rho);

// Correction rate gamma in [0, 1] solving
// (1 - gamma)^2 * delta_tau = eta * delta_tau + (1 - eta) * delta_q.
double compute_gamma(double delta_tau, double eta, double delta_q);

// Exponential moving average of (1 - gamma), i.e. the replay priority decay.
double update_priority(double gamma_bar, double gamma, double lambda);

// z <- (1 - gamma) z + gamma h, in place. Throws on dimension mismatch.
void correct_feature(std::span<double> z, std::span<const double> h, double gamma);

// Descent gradients of the auto-tuning objectives w.r.t. beta and alpha.
// compensated_reg_mean is the mean of eta * (delta_tau - delta_q) over the
// regularization half.
std::pair<double, double> multiplier_gradients(double loss_fifo, double loss_rs,
                                               double compensated_reg_mean);

// Lagrange multipliers alpha >= 0 and beta in [0, 1], stored as unconstrained
// pre-images (softplus / logistic maps) so the domains hold after any number
// of mirror-descent steps, plus the running quantile threshold delta_q.
struct AdaptiveWeights {
    double alpha_pre = 0.0;
    double beta_pre = 0.0;
    double delta_q = 0.0;
    bool delta_q_initialized = false;
    double rho = 0.5;
    double lambda = 0.5;
    double lr_mult = 1e-2;

    static AdaptiveWeights from_initial(double alpha0, double beta0, double rho, double lambda,
                                        double lr_mult);

    double alpha() const { return softplus(alpha_pre); }
    double beta() const { return sigmoid(beta_pre); }
    double delta_q_bar() const { return delta_q + delta_q * (1.0 - rho) / rho; }

    // EMA toward the batch rho-quantile at rate batch_size / reservoir
    // capacity; the first call seeds delta_q with the quantile directly.
    void update_delta_q(std::span<const double> raw_deltas, int batch_size,
                        std::int64_t reservoir_total_capacity);

    // One descent step on the pre-images through the chain rule of the
    // constrained maps.
    void apply_multiplier_gradients(double g_alpha, double g_beta);
};

}  // namespace a2er
