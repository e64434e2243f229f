#include "a2er/reservoir_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace a2er {

ReservoirBuffer::ReservoirBuffer(std::int64_t capacity, CounterDesign design)
    : capacity_(capacity), design_(design) {
    if (capacity < 1) throw std::invalid_argument("reservoir capacity must be positive");
    validate(design_);
    slots_.reserve(static_cast<std::size_t>(capacity));
}

OfferResult ReservoirBuffer::offer(Record rec, std::mt19937_64& rng) {
    ++n_;
    if (n_ <= capacity_) {
        index_[rec.id] = slots_.size();
        slots_.push_back(std::move(rec));
        return {OfferOutcome::AcceptedIntoFree, std::nullopt};
    }

    const std::int64_t fn = counter_value(design_, n_, capacity_);
    std::uniform_int_distribution<std::int64_t> dist(1, fn);
    const std::int64_t k = dist(rng);
    if (k > capacity_) {
        return {OfferOutcome::Rejected, std::move(rec)};
    }

    const std::size_t slot = static_cast<std::size_t>(k - 1);
    Record displaced = std::move(slots_[slot]);
    index_.erase(displaced.id);
    index_[rec.id] = slot;
    slots_[slot] = std::move(rec);
    return {OfferOutcome::AcceptedReplacing, std::move(displaced)};
}

bool ReservoirBuffer::update_feature(std::int64_t id, std::span<const double> z_new,
                                     double gamma_bar_new) {
    auto it = index_.find(id);
    if (it == index_.end()) {
        ++feature_miss_count_;
        return false;
    }
    Record& rec = slots_[it->second];
    rec.z.assign(z_new.begin(), z_new.end());
    rec.gamma_bar = gamma_bar_new;
    return true;
}

const Record* ReservoirBuffer::find(std::int64_t id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &slots_[it->second];
}

GammaStats ReservoirBuffer::gamma_stats() const {
    if (slots_.empty()) return {0.0, 0.0};
    double lo = slots_.front().gamma_bar;
    double hi = lo;
    for (const Record& r : slots_) {
        lo = std::min(lo, r.gamma_bar);
        hi = std::max(hi, r.gamma_bar);
    }
    return {lo, hi};
}

void ReservoirBuffer::restore(std::int64_t n, std::vector<Record> slots) {
    if (static_cast<std::int64_t>(slots.size()) > capacity_) {
        throw std::invalid_argument("snapshot has more records than capacity");
    }
    n_ = n;
    slots_ = std::move(slots);
    reindex();
}

void ReservoirBuffer::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        index_[slots_[i].id] = i;
    }
}

}  // namespace a2er
