#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "a2er/counter.hpp"

using namespace a2er;

TEST_CASE("classic counter is the identity") {
    const CounterDesign d{CounterKind::QLog, 0.0};
    CHECK(counter_value(d, 250, 100) == 250);
    CHECK(counter_value(d, 1, 100) == 1);
    CHECK(counter_value(d, 1000000, 512) == 1000000);
}

TEST_CASE("every design is continuous at the capacity") {
    for (double q : {0.0, 0.7, 1.0, 1.3, 2.0}) {
        CHECK(counter_value({CounterKind::QLog, q}, 100, 100) == 100);
    }
    CHECK(counter_value({CounterKind::Linear, 0.5}, 100, 100) == 100);
    CHECK(counter_value({CounterKind::Exp, 0.5}, 100, 100) == 100);
}

TEST_CASE("qlog q=2 approaches the bounded limit") {
    // limit N + N/(q-1) = 200; the floored value sits within one of it
    const CounterDesign d{CounterKind::QLog, 2.0};
    const std::int64_t f = counter_value(d, 1000000, 100);
    CHECK(f >= 199);
    CHECK(f <= 200);
}

TEST_CASE("linear counter example") {
    CHECK(counter_value({CounterKind::Linear, 0.5}, 300, 100) == 200);
}

TEST_CASE("exp counter at q ~ 0 falls back to the identity") {
    CHECK(counter_value({CounterKind::Exp, 0.0}, 5000, 100) == 5000);
    CHECK(counter_value({CounterKind::Exp, 1e-13}, 5000, 100) == 5000);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(validate(CounterDesign{CounterKind::QLog, 2.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CounterDesign{CounterKind::QLog, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CounterDesign{CounterKind::Linear, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CounterDesign{CounterKind::Exp, 1.1}), std::invalid_argument);
    CHECK_NOTHROW(validate(CounterDesign{CounterKind::Exp, 1.0}));
}

TEST_CASE("counter laws over a sampled range") {
    // monotone, unit increments past capacity, q-ordering; the acceptance
    // suite runs the exhaustive version up to 10^6
    const std::int64_t capacity = 100;
    std::vector<CounterDesign> designs;
    for (double q : {0.0, 0.5, 1.0, 1.5, 2.0}) designs.push_back({CounterKind::QLog, q});
    for (double q : {0.0, 0.5, 0.9}) designs.push_back({CounterKind::Linear, q});
    for (double q : {0.1, 0.5, 1.0}) designs.push_back({CounterKind::Exp, q});

    for (const auto& d : designs) {
        std::int64_t prev = 0;
        for (std::int64_t n = 1; n <= 20000; ++n) {
            const std::int64_t f = counter_value(d, n, capacity);
            const std::int64_t df = f - prev;
            CHECK(df >= 0);
            CHECK(df <= 1);
            prev = f;
        }
    }

    // Fig-3 ordering: larger q never exceeds smaller q
    for (std::int64_t n : {101, 150, 500, 5000, 100000}) {
        std::int64_t last = counter_value({CounterKind::QLog, 0.0}, n, capacity);
        for (double q : {0.5, 1.0, 1.5, 2.0}) {
            const std::int64_t f = counter_value({CounterKind::QLog, q}, n, capacity);
            CHECK(f <= last);
            last = f;
        }
    }
}

TEST_CASE("kind name round trip") {
    for (CounterKind k : {CounterKind::QLog, CounterKind::Linear, CounterKind::Exp}) {
        CHECK(counter_kind_from_name(counter_kind_name(k)) == k);
    }
    CHECK_THROWS_AS(counter_kind_from_name("nope"), std::invalid_argument);
}
