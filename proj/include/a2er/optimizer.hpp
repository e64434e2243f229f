#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace a2er {

// Bias-corrected adaptive-moment gradient descent.
class MomentOptimizer {
public:
    explicit MomentOptimizer(std::size_t param_count, double lr = 1e-3, double beta1 = 0.9,
                             double beta2 = 0.999, double eps = 1e-8);

    // Returns false (parameters untouched) when any gradient is non-finite.
    bool step(std::span<double> params, std::span<const double> grads);

    std::int64_t steps_taken() const { return t_; }
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace a2er
