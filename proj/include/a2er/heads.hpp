#pragma once

#include <span>
#include <string>
#include <vector>

namespace a2er {

// Gaussian: z = (mean, log-std), 2 outputs. Categorical: z = logits.
enum class HeadKind { Gaussian, Categorical };

// Negative log-likelihood of target y under the head distribution.
// Target convention: Gaussian reads y[0]; Categorical reads the class index
// from y[0] (throws std::out_of_range on an invalid index).
double nll(HeadKind head, std::span<const double> z, std::span<const double> y);

// d(nll)/dz written into dz.
void nll_grad(HeadKind head, std::span<const double> z, std::span<const double> y,
              std::span<double> dz);

std::vector<double> softmax(std::span<const double> z);

// KL(N(mu_true, sigma_true^2) || N(mu_pred, sigma_pred^2)); the true
// distribution is the reference. Throws std::domain_error on nonpositive sigma.
double kld_gaussian(double mu_true, double sigma_true, double mu_pred, double sigma_pred);

HeadKind head_kind_from_name(const std::string& name);

}  // namespace a2er
