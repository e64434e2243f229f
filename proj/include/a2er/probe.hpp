#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "a2er/counter.hpp"

namespace a2er {

struct ProbeResult {
    double empirical = 0.0;
    double analytic = 0.0;
    std::int64_t trials = 0;
    double z_score = 0.0;
};

// Probability that the datum offered at position n (n > capacity) is still
// resident after n_prime further offers:
// (N / f(n + n')) * prod_{m=1..n'} (f(n+m) - 1) / f(n+m-1).
// With n' = 0 this reduces to the acceptance probability N / f(n); for the
// identity counter it telescopes to N / (n + n').
double analytic_retention(const CounterDesign& design, std::int64_t capacity, std::int64_t n,
                          std::int64_t n_prime);

// Membership probability of the mark-th offered datum after `offers` total
// offers, covering the fill phase as well: a datum offered at mark <= capacity
// is accepted surely and then survives each later offer m with probability
// (f(m) - 1) / f(m).
double analytic_membership(const CounterDesign& design, std::int64_t capacity, std::int64_t offers,
                           std::int64_t mark);

// Simulates `trials` independent buffer runs of `offers` distinct tokens and
// estimates P(token #mark resident at the end), with a binomial z-score
// against the analytic value. Trials use per-trial RNG streams derived from
// `seed`, so the result is independent of the parallelism degree.
ProbeResult empirical_membership(const CounterDesign& design, std::int64_t capacity,
                                 std::int64_t offers, std::int64_t mark, std::int64_t trials,
                                 std::uint64_t seed, int threads = 0);

// (n, min(1, N / f(n))) rows for plotting and regression tests.
std::vector<std::pair<std::int64_t, double>> acceptance_curve(const CounterDesign& design,
                                                              std::int64_t capacity,
                                                              std::int64_t max_offers,
                                                              std::int64_t stride);

}  // namespace a2er
