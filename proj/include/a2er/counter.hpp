#pragma once

#include <cstdint>
#include <string>

namespace a2er {

// Growth law of the reservoir counter transform f(n). The acceptance
// probability of the n-th offer into a full buffer is N / f(n), so slower
// counter growth keeps the buffer plastic while f(n) = n reproduces classic
// reservoir sampling.
enum class CounterKind { QLog, Linear, Exp };

struct CounterDesign {
    CounterKind kind = CounterKind::QLog;
    double q = 0.0;
};

// Tsallis q-deformed logarithm: ln_q(x) = (x^(1-q) - 1) / (1 - q), ln at q=1.
double q_log(double q, double x);

// Throws std::invalid_argument when q is outside the kind's domain:
// QLog q in [0,2], Linear q in [0,1), Exp q in [0,1] (q ~ 0 uses the
// identity-counter limit).
void validate(const CounterDesign& design);

// f(n) for the given design. f(n) = n while n <= capacity; past capacity the
// per-offer increment stays in {0, 1} so retention probabilities remain well
// defined.
std::int64_t counter_value(const CounterDesign& design, std::int64_t n, std::int64_t capacity);

CounterKind counter_kind_from_name(const std::string& name);
std::string counter_kind_name(CounterKind kind);

}  // namespace a2er
