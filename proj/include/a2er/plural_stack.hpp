#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "a2er/reservoir_buffer.hpp"

namespace a2er {

// nu for the omission exponent from the rejection probability knob zeta.
// zeta = 0 returns +infinity as the "omission disabled" sentinel; zeta = 1
// returns 0 (everything of non-maximal priority is rejected).
double nu_from_zeta(double zeta);

// ((max - clamp(g, min, max)) / (max - min))^nu, with the flat-priority guard:
// 0 whenever max - min < 1e-5. A zero base always yields 0, for every nu.
double rejection_probability(double gamma_bar, double gamma_max, double gamma_min, double nu);

struct LayerConfig {
    std::int64_t capacity = 0;
    CounterDesign design;
};

struct StackConfig {
    std::vector<LayerConfig> layers;
    double zeta = 0.0;  // 0 disables omission
};

// Replay sample drawn across layers: two disjoint halves, one replayed against
// its targets, one against its stored features.
struct ReplayItem {
    int layer = 0;
    Record rec;  // snapshot copy, stable until the next buffer mutation
};

struct ReplaySample {
    std::vector<ReplayItem> rehearsal;
    std::vector<ReplayItem> regularization;
    bool uniform_fallback = false;  // some layer had all-zero priorities
};

struct LayerCounters {
    std::int64_t offers = 0;
    std::int64_t accepted_free = 0;
    std::int64_t accepted_replacing = 0;
    std::int64_t rejected = 0;
    std::int64_t omission_drops = 0;  // dropped before this layer's offer
};

// Serial chain of reservoir buffers fed by FIFO evictions. A record displaced
// from layer l becomes the candidate for layer l+1; a rejected offer ends the
// pipeline. With omission enabled, low-priority candidates are dropped before
// the offer so the target layer's counter does not advance.
class PluralStack {
public:
    explicit PluralStack(StackConfig cfg);

    // rec is a FIFO eviction (feature already filled in by the caller).
    // Returns the (layer, result) list of offers actually made.
    std::vector<std::pair<int, OfferResult>> offer(Record rec, std::mt19937_64& rng);

    // Draws up to 2*count/L records per layer without replacement, weighted by
    // gamma_bar, and splits them into two disjoint halves.
    ReplaySample sample_replay(int count, std::mt19937_64& rng) const;

    bool update_feature(int layer, std::int64_t id, std::span<const double> z_new,
                        double gamma_bar_new);

    int num_layers() const { return static_cast<int>(layers_.size()); }
    const ReservoirBuffer& layer(int l) const { return layers_.at(static_cast<std::size_t>(l)); }
    std::size_t total_size() const;
    std::int64_t total_capacity() const;

    double zeta() const { return zeta_; }
    double nu() const { return nu_; }
    bool omission_enabled() const { return zeta_ > 0.0; }

    const std::vector<LayerCounters>& counters() const { return counters_; }
    std::int64_t feature_miss_count() const;

    ReservoirBuffer& mutable_layer(int l) { return layers_.at(static_cast<std::size_t>(l)); }

private:
    std::vector<ReservoirBuffer> layers_;
    double zeta_;
    double nu_;
    std::vector<LayerCounters> counters_;

    double layer_rejection(int layer, double candidate_gamma_bar) const;
};

}  // namespace a2er
