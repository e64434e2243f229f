#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>

#include "a2er/record.hpp"

namespace a2er {

// Plain bounded FIFO; pushing at capacity evicts the oldest record and hands
// it back so the caller can pass it on to the reservoir stage.
class FifoBuffer {
public:
    explicit FifoBuffer(std::int64_t capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("fifo capacity must be positive");
    }

    std::optional<Record> push(Record rec) {
        std::optional<Record> evicted;
        if (static_cast<std::int64_t>(slots_.size()) == capacity_) {
            evicted = std::move(slots_.front());
            slots_.pop_front();
        }
        slots_.push_back(std::move(rec));
        return evicted;
    }

    std::int64_t capacity() const { return capacity_; }
    std::size_t size() const { return slots_.size(); }
    const Record& at(std::size_t i) const { return slots_.at(i); }

    const std::deque<Record>& slots() const { return slots_; }
    void clear() { slots_.clear(); }

private:
    std::int64_t capacity_;
    std::deque<Record> slots_;
};

}  // namespace a2er
