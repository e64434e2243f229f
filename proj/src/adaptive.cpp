#include "a2er/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace a2er {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
    if (y <= 0.0) throw std::invalid_argument("softplus_inv needs y > 0");
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double interpolated_quantile(std::vector<double> values, double rho) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("rho must lie in (0, 1)");
    std::sort(values.begin(), values.end());
    const double pos = rho * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double compute_eta(double delta_tau, double delta_q, double rho) {
    const double bar = delta_q + delta_q * (1.0 - rho) / rho;
    if (!(bar > delta_q)) {
        return 1.0;  // delta_q = 0: no spread to measure against
    }
    const double clipped = std::clamp(delta_tau, delta_q, bar);
    return 1.0 - (clipped - delta_q) / (bar - delta_q);
}

double compute_gamma(double delta_tau, double eta, double delta_q) {
    if (delta_tau <= 0.0) return 0.0;
    const double target = eta * delta_tau + (1.0 - eta) * delta_q;
    const double g = 1.0 - std::sqrt(target / delta_tau);
    return std::clamp(g, 0.0, 1.0);
}

double update_priority(double gamma_bar, double gamma, double lambda) {
    return (1.0 - lambda) * gamma_bar + lambda * (1.0 - gamma);
}

void correct_feature(std::span<double> z, std::span<const double> h, double gamma) {
    if (z.size() != h.size()) throw std::invalid_argument("feature dimensions differ");
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = (1.0 - gamma) * z[i] + gamma * h[i];
    }
}

std::pair<double, double> multiplier_gradients(double loss_fifo, double loss_rs,
                                               double compensated_reg_mean) {
    const double g_beta = -(loss_rs - loss_fifo);
    const double g_alpha = -compensated_reg_mean;
    return {g_beta, g_alpha};
}

AdaptiveWeights AdaptiveWeights::from_initial(double alpha0, double beta0, double rho,
                                              double lambda, double lr_mult) {
    if (beta0 <= 0.0 || beta0 >= 1.0) throw std::invalid_argument("beta0 must lie in (0, 1)");
    AdaptiveWeights w;
    w.alpha_pre = softplus_inv(alpha0);
    w.beta_pre = std::log(beta0 / (1.0 - beta0));
    w.rho = rho;
    w.lambda = lambda;
    w.lr_mult = lr_mult;
    return w;
}

void AdaptiveWeights::update_delta_q(std::span<const double> raw_deltas, int batch_size,
                                     std::int64_t reservoir_total_capacity) {
    if (raw_deltas.empty()) return;
    const double q = interpolated_quantile({raw_deltas.begin(), raw_deltas.end()}, rho);
    if (!delta_q_initialized) {
        delta_q = q;
        delta_q_initialized = true;
        return;
    }
    const double rate = static_cast<double>(batch_size) / static_cast<double>(reservoir_total_capacity);
    delta_q = (1.0 - rate) * delta_q + rate * q;
}

void AdaptiveWeights::apply_multiplier_gradients(double g_alpha, double g_beta) {
    // chain rule through the constrained maps: d softplus = sigmoid,
    // d sigmoid = b (1 - b)
    alpha_pre -= lr_mult * g_alpha * sigmoid(alpha_pre);
    const double b = beta();
    beta_pre -= lr_mult * g_beta * b * (1.0 - b);
}

}  // namespace a2er
