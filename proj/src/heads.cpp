#include "a2er/heads.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace a2er {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

int class_index(std::span<const double> z, std::span<const double> y) {
    if (y.empty()) throw std::out_of_range("missing class index");
    const int k = static_cast<int>(y[0]);
    if (k < 0 || k >= static_cast<int>(z.size())) {
        throw std::out_of_range("class index out of range");
    }
    return k;
}

double log_sum_exp(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

double nll(HeadKind head, std::span<const double> z, std::span<const double> y) {
    if (head == HeadKind::Gaussian) {
        if (z.size() != 2 || y.empty()) throw std::invalid_argument("gaussian head needs z=(mu,log_sigma), y=(target)");
        const double mu = z[0];
        const double log_sigma = z[1];
        const double u = (y[0] - mu) * std::exp(-log_sigma);
        return 0.5 * u * u + log_sigma + kHalfLog2Pi;
    }
    const int k = class_index(z, y);
    return log_sum_exp(z) - z[static_cast<std::size_t>(k)];
}

void nll_grad(HeadKind head, std::span<const double> z, std::span<const double> y,
              std::span<double> dz) {
    if (dz.size() != z.size()) throw std::invalid_argument("gradient size mismatch");
    if (head == HeadKind::Gaussian) {
        const double mu = z[0];
        const double log_sigma = z[1];
        const double inv_sigma = std::exp(-log_sigma);
        const double u = (y[0] - mu) * inv_sigma;
        dz[0] = -u * inv_sigma;
        dz[1] = 1.0 - u * u;
        return;
    }
    const int k = class_index(z, y);
    const auto p = softmax(z);
    for (std::size_t i = 0; i < z.size(); ++i) dz[i] = p[i];
    dz[static_cast<std::size_t>(k)] -= 1.0;
}

std::vector<double> softmax(std::span<const double> z) {
    std::vector<double> p(z.size());
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - m);
        s += p[i];
    }
    for (double& v : p) v /= s;
    return p;
}

double kld_gaussian(double mu_true, double sigma_true, double mu_pred, double sigma_pred) {
    if (sigma_true <= 0.0 || sigma_pred <= 0.0) {
        throw std::domain_error("kld_gaussian needs positive standard deviations");
    }
    const double dm = mu_true - mu_pred;
    const double r = sigma_true / sigma_pred;
    return std::log(sigma_pred / sigma_true) + 0.5 * (r * r + dm * dm / (sigma_pred * sigma_pred)) - 0.5;
}

HeadKind head_kind_from_name(const std::string& name) {
    if (name == "gaussian") return HeadKind::Gaussian;
    if (name == "categorical") return HeadKind::Categorical;
    throw std::invalid_argument("unknown head kind: " + name);
}

}  // namespace a2er
