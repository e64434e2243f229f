#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "a2er/counter.hpp"
#include "a2er/record.hpp"

namespace a2er {

enum class OfferOutcome { AcceptedIntoFree, AcceptedReplacing, Rejected };

struct OfferResult {
    OfferOutcome outcome;
    // AcceptedReplacing: the displaced record. Rejected: the offer, untouched.
    std::optional<Record> record;
};

struct GammaStats {
    double min = 0.0;
    double max = 0.0;
};

// Reservoir buffer with a generalized counter. Every offer advances the
// counter n by one; once full, the n-th offer is accepted with probability
// capacity / f(n) and lands on the slot drawn by the selection index.
class ReservoirBuffer {
public:
    ReservoirBuffer(std::int64_t capacity, CounterDesign design);

    OfferResult offer(Record rec, std::mt19937_64& rng);

    // Replaces the stored feature and priority in place; the counter is not
    // touched. Returns false (and bumps the miss counter) when the id is gone.
    bool update_feature(std::int64_t id, std::span<const double> z_new, double gamma_bar_new);

    const Record* find(std::int64_t id) const;

    // min/max of stored gamma_bar; empty buffer yields {0, 0}.
    GammaStats gamma_stats() const;

    std::int64_t capacity() const { return capacity_; }
    std::int64_t counter() const { return n_; }
    const CounterDesign& design() const { return design_; }
    std::size_t size() const { return slots_.size(); }
    const std::vector<Record>& slots() const { return slots_; }
    std::int64_t feature_miss_count() const { return feature_miss_count_; }

    // Restores a snapshot; used by the JSON (de)serializer.
    void restore(std::int64_t n, std::vector<Record> slots);

private:
    std::int64_t capacity_;
    CounterDesign design_;
    std::int64_t n_ = 0;
    std::vector<Record> slots_;
    std::unordered_map<std::int64_t, std::size_t> index_;  // id -> slot
    std::int64_t feature_miss_count_ = 0;

    void reindex();
};

}  // namespace a2er
