#include "a2er/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace a2er {

MomentOptimizer::MomentOptimizer(std::size_t param_count, double lr, double beta1, double beta2,
                                 double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(param_count, 0.0), v_(param_count, 0.0) {
    if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
}

bool MomentOptimizer::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw std::invalid_argument("optimizer state size mismatch");
    }
    for (double g : grads) {
        if (!std::isfinite(g)) return false;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const double g = grads[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
    return true;
}

}  // namespace a2er
