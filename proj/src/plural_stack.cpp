#include "a2er/plural_stack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace a2er {

namespace {
constexpr double kGammaRangeEps = 1e-5;  // flat-priority guard from the omission rule
}

double nu_from_zeta(double zeta) {
    if (zeta < 0.0 || zeta > 1.0) {
        throw std::invalid_argument("zeta must lie in [0, 1]");
    }
    if (zeta == 0.0) {
        return std::numeric_limits<double>::infinity();  // omission disabled
    }
    return -std::log(1.0 - std::sqrt(1.0 - zeta)) / std::numbers::ln2;
}

double rejection_probability(double gamma_bar, double gamma_max, double gamma_min, double nu) {
    const double range = gamma_max - gamma_min;
    if (!(range >= kGammaRangeEps)) {
        return 0.0;
    }
    const double g = std::clamp(gamma_bar, gamma_min, gamma_max);
    const double base = (gamma_max - g) / range;
    if (base <= 0.0) {
        return 0.0;  // maximal priority never rejected, also at nu = 0
    }
    if (std::isinf(nu)) {
        return base >= 1.0 ? 1.0 : 0.0;
    }
    return std::pow(base, nu);
}

PluralStack::PluralStack(StackConfig cfg) : zeta_(cfg.zeta), nu_(nu_from_zeta(cfg.zeta)) {
    if (cfg.layers.empty()) {
        throw std::invalid_argument("stack needs at least one layer");
    }
    for (std::size_t l = 0; l < cfg.layers.size(); ++l) {
        layers_.emplace_back(cfg.layers[l].capacity, cfg.layers[l].design);
        // plasticity shallow, consolidation deep
        if (l > 0 && cfg.layers[l - 1].design.kind == cfg.layers[l].design.kind &&
            cfg.layers[l - 1].design.q < cfg.layers[l].design.q) {
            throw std::invalid_argument("layer balances must be nonincreasing with depth");
        }
    }
    counters_.resize(layers_.size());
}

double PluralStack::layer_rejection(int layer, double candidate_gamma_bar) const {
    GammaStats s = layers_[static_cast<std::size_t>(layer)].gamma_stats();
    if (layers_[static_cast<std::size_t>(layer)].size() == 0) {
        s = {candidate_gamma_bar, candidate_gamma_bar};
    } else {
        s.min = std::min(s.min, candidate_gamma_bar);
        s.max = std::max(s.max, candidate_gamma_bar);
    }
    return rejection_probability(candidate_gamma_bar, s.max, s.min, nu_);
}

std::vector<std::pair<int, OfferResult>> PluralStack::offer(Record rec, std::mt19937_64& rng) {
    std::vector<std::pair<int, OfferResult>> results;
    Record cand = std::move(rec);
    for (int l = 0; l < num_layers(); ++l) {
        if (omission_enabled()) {
            // p_rej of the two adjacent buffers; the FIFO side contributes 0.
            const double p_prev = (l == 0) ? 0.0 : layer_rejection(l - 1, cand.gamma_bar);
            const double p_this = layer_rejection(l, cand.gamma_bar);
            const double p = 1.0 - (1.0 - p_prev) * (1.0 - p_this);
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            if (u01(rng) < p) {
                ++counters_[static_cast<std::size_t>(l)].omission_drops;
                break;  // dropped without advancing layer l's counter
            }
        }
        auto& c = counters_[static_cast<std::size_t>(l)];
        ++c.offers;
        OfferResult res = layers_[static_cast<std::size_t>(l)].offer(std::move(cand), rng);
        const OfferOutcome outcome = res.outcome;
        if (outcome == OfferOutcome::AcceptedReplacing) {
            ++c.accepted_replacing;
            cand = *res.record;
            results.emplace_back(l, OfferResult{outcome, res.record});
            continue;  // displaced record cascades to the next layer
        }
        if (outcome == OfferOutcome::AcceptedIntoFree) {
            ++c.accepted_free;
        } else {
            ++c.rejected;
        }
        results.emplace_back(l, std::move(res));
        break;
    }
    return results;
}

namespace {

// Sequential weighted draw without replacement. Zero-weight records are never
// taken while positive-weight ones remain; an all-zero layer falls back to
// uniform sampling and reports it through the flag.
std::vector<std::size_t> weighted_indices_without_replacement(const std::vector<Record>& slots,
                                                              std::size_t count,
                                                              std::mt19937_64& rng,
                                                              bool& uniform_fallback) {
    std::vector<double> w(slots.size());
    double total = 0.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        w[i] = std::max(0.0, slots[i].gamma_bar);
        total += w[i];
    }
    if (total <= 0.0 && !slots.empty()) {
        uniform_fallback = true;
        std::fill(w.begin(), w.end(), 1.0);
    }

    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t draw = 0; draw < count; ++draw) {
        total = 0.0;
        for (double wi : w) total += wi;
        if (total <= 0.0) break;
        std::uniform_real_distribution<double> dist(0.0, total);
        const double u = dist(rng);
        double acc = 0.0;
        std::size_t chosen = slots.size();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] <= 0.0) continue;
            acc += w[i];
            if (u < acc) {
                chosen = i;
                break;
            }
            chosen = i;  // guard against summation round-off on the last entry
        }
        if (chosen == slots.size()) break;
        picked.push_back(chosen);
        w[chosen] = 0.0;
    }
    return picked;
}

}  // namespace

ReplaySample PluralStack::sample_replay(int count, std::mt19937_64& rng) const {
    ReplaySample out;
    if (count < 1) return out;
    const int quota = (2 * count) / num_layers();

    std::vector<ReplayItem> drawn;
    drawn.reserve(static_cast<std::size_t>(quota) * static_cast<std::size_t>(num_layers()));
    for (int l = 0; l < num_layers(); ++l) {
        const auto& slots = layers_[static_cast<std::size_t>(l)].slots();
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(quota), slots.size());
        if (take == 0) continue;
        bool fallback = false;
        auto idx = weighted_indices_without_replacement(slots, take, rng, fallback);
        out.uniform_fallback = out.uniform_fallback || fallback;
        for (std::size_t i : idx) {
            drawn.push_back(ReplayItem{l, slots[i]});
        }
    }

    // Alternate the concatenated draws so both halves see every layer; an odd
    // leftover goes to the rehearsal half.
    for (std::size_t i = 0; i < drawn.size(); ++i) {
        if (i % 2 == 0) {
            out.rehearsal.push_back(std::move(drawn[i]));
        } else {
            out.regularization.push_back(std::move(drawn[i]));
        }
    }
    return out;
}

bool PluralStack::update_feature(int layer, std::int64_t id, std::span<const double> z_new,
                                 double gamma_bar_new) {
    return layers_.at(static_cast<std::size_t>(layer)).update_feature(id, z_new, gamma_bar_new);
}

std::size_t PluralStack::total_size() const {
    std::size_t s = 0;
    for (const auto& l : layers_) s += l.size();
    return s;
}

std::int64_t PluralStack::total_capacity() const {
    std::int64_t s = 0;
    for (const auto& l : layers_) s += l.capacity();
    return s;
}

std::int64_t PluralStack::feature_miss_count() const {
    std::int64_t s = 0;
    for (const auto& l : layers_) s += l.feature_miss_count();
    return s;
}

}  // namespace a2er
