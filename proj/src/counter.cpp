#include "a2er/counter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace a2er {

namespace {
constexpr double kQOne = 1e-12;  // below this, q-dependent branches use their limits
}

double q_log(double q, double x) {
    if (std::abs(q - 1.0) < kQOne) {
        return std::log(x);
    }
    return (std::pow(x, 1.0 - q) - 1.0) / (1.0 - q);
}

void validate(const CounterDesign& design) {
    switch (design.kind) {
        case CounterKind::QLog:
            if (design.q < 0.0 || design.q > 2.0) {
                throw std::invalid_argument("qlog counter requires q in [0, 2]");
            }
            return;
        case CounterKind::Linear:
            if (design.q < 0.0 || design.q >= 1.0) {
                throw std::invalid_argument("linear counter requires q in [0, 1)");
            }
            return;
        case CounterKind::Exp:
            if (design.q < 0.0 || design.q > 1.0) {
                throw std::invalid_argument("exp counter requires q in [0, 1]");
            }
            return;
    }
    throw std::invalid_argument("unknown counter kind");
}

std::int64_t counter_value(const CounterDesign& design, std::int64_t n, std::int64_t capacity) {
    if (capacity < 1) {
        throw std::invalid_argument("counter capacity must be positive");
    }
    validate(design);

    const std::int64_t base = std::min(n, capacity);
    const std::int64_t over = std::max<std::int64_t>(0, n - capacity);
    if (over == 0) {
        return base;
    }

    const double cap = static_cast<double>(capacity);
    const double m = static_cast<double>(over);
    double extra = 0.0;
    switch (design.kind) {
        case CounterKind::QLog:
            if (design.q < kQOne) {
                return base + over;  // f(n) = n, classic reservoir sampling
            }
            extra = std::floor(cap * q_log(design.q, 1.0 + m / cap));
            break;
        case CounterKind::Linear:
            extra = std::floor((1.0 - design.q) * m);
            break;
        case CounterKind::Exp:
            if (design.q < kQOne) {
                return base + over;  // limit of the exponential design
            }
            extra = std::floor((cap / design.q) * (1.0 - std::exp(-design.q * m / cap)));
            break;
    }
    return base + static_cast<std::int64_t>(extra);
}

CounterKind counter_kind_from_name(const std::string& name) {
    if (name == "qlog") return CounterKind::QLog;
    if (name == "lin" || name == "linear") return CounterKind::Linear;
    if (name == "exp") return CounterKind::Exp;
    throw std::invalid_argument("unknown counter design: " + name);
}

std::string counter_kind_name(CounterKind kind) {
    switch (kind) {
        case CounterKind::QLog: return "qlog";
        case CounterKind::Linear: return "lin";
        case CounterKind::Exp: return "exp";
    }
    return "?";
}

}  // namespace a2er
