#include "a2er/probe.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "a2er/parallel.hpp"
#include "a2er/record.hpp"
#include "a2er/reservoir_buffer.hpp"
#include "a2er/rng.hpp"

namespace a2er {

double analytic_retention(const CounterDesign& design, std::int64_t capacity, std::int64_t n,
                          std::int64_t n_prime) {
    if (n <= capacity) throw std::invalid_argument("analytic_retention needs n > capacity");
    if (n_prime < 0) throw std::invalid_argument("n_prime must be nonnegative");
    double p = static_cast<double>(capacity) /
               static_cast<double>(counter_value(design, n + n_prime, capacity));
    for (std::int64_t m = 1; m <= n_prime; ++m) {
        const double f_m = static_cast<double>(counter_value(design, n + m, capacity));
        const double f_prev = static_cast<double>(counter_value(design, n + m - 1, capacity));
        p *= (f_m - 1.0) / f_prev;
    }
    return p;
}

double analytic_membership(const CounterDesign& design, std::int64_t capacity, std::int64_t offers,
                           std::int64_t mark) {
    if (mark < 1 || mark > offers) throw std::invalid_argument("mark must lie in [1, offers]");
    if (offers <= capacity) return 1.0;
    if (mark > capacity) return analytic_retention(design, capacity, mark, offers - mark);
    // fill-phase datum: accepted surely, then hit with probability 1/f(m) per
    // later offer
    double p = 1.0;
    for (std::int64_t m = capacity + 1; m <= offers; ++m) {
        const double f_m = static_cast<double>(counter_value(design, m, capacity));
        p *= (f_m - 1.0) / f_m;
    }
    return p;
}

ProbeResult empirical_membership(const CounterDesign& design, std::int64_t capacity,
                                 std::int64_t offers, std::int64_t mark, std::int64_t trials,
                                 std::uint64_t seed, int threads) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    const double analytic = analytic_membership(design, capacity, offers, mark);

    std::atomic<std::int64_t> resident{0};
    parallel_for(trials, threads, [&](std::int64_t trial) {
        auto rng = make_rng(derive_seed(seed, 0x9806e, static_cast<std::uint64_t>(trial)));
        ReservoirBuffer buf(capacity, design);
        for (std::int64_t i = 1; i <= offers; ++i) {
            Record rec;
            rec.id = i;
            buf.offer(std::move(rec), rng);
        }
        if (buf.find(mark) != nullptr) {
            resident.fetch_add(1, std::memory_order_relaxed);
        }
    });

    ProbeResult res;
    res.trials = trials;
    res.analytic = analytic;
    res.empirical = static_cast<double>(resident.load()) / static_cast<double>(trials);
    const double var = analytic * (1.0 - analytic) / static_cast<double>(trials);
    res.z_score = var > 0.0 ? (res.empirical - analytic) / std::sqrt(var) : 0.0;
    return res;
}

std::vector<std::pair<std::int64_t, double>> acceptance_curve(const CounterDesign& design,
                                                              std::int64_t capacity,
                                                              std::int64_t max_offers,
                                                              std::int64_t stride) {
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    std::vector<std::pair<std::int64_t, double>> rows;
    for (std::int64_t n = 1; n <= max_offers; n += stride) {
        const double f = static_cast<double>(counter_value(design, n, capacity));
        rows.emplace_back(n, std::min(1.0, static_cast<double>(capacity) / f));
    }
    return rows;
}

}  // namespace a2er
