#include "a2er/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace a2er {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("mlp needs at least two layer sizes");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("layer sizes must be positive");
        w_off_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l]);
        b_off_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l + 1]);
    }
    params_.assign(total, 0.0);
}

void Mlp::init_xavier(std::mt19937_64& rng) {
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-a, a);
        double* w = params_.data() + w_off_[l];
        for (int i = 0; i < fan_out * fan_in; ++i) w[i] = dist(rng);
        double* b = params_.data() + b_off_[l];
        for (int i = 0; i < fan_out; ++i) b[i] = 0.0;
    }
}

Mlp::Workspace Mlp::make_workspace() const {
    Workspace ws;
    ws.act.resize(sizes_.size());
    int widest = 0;
    for (std::size_t l = 0; l < sizes_.size(); ++l) {
        ws.act[l].assign(static_cast<std::size_t>(sizes_[l]), 0.0);
        widest = std::max(widest, sizes_[l]);
    }
    ws.delta.assign(static_cast<std::size_t>(widest), 0.0);
    ws.delta_prev.assign(static_cast<std::size_t>(widest), 0.0);
    return ws;
}

void Mlp::forward(std::span<const double> x, Workspace& ws) const {
    if (static_cast<int>(x.size()) != sizes_.front()) {
        throw std::invalid_argument("input dimension mismatch");
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite input");
    }
    std::copy(x.begin(), x.end(), ws.act[0].begin());

    const std::size_t last = sizes_.size() - 2;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        const double* src = ws.act[l].data();
        double* dst = ws.act[l + 1].data();
        for (int j = 0; j < out; ++j) {
            double s = b[j];
            const double* row = w + static_cast<std::size_t>(j) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i) s += row[i] * src[i];
            dst[j] = (l == last) ? s : std::tanh(s);
        }
    }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    Workspace ws = make_workspace();
    forward(x, ws);
    return ws.act.back();
}

void Mlp::backward(Workspace& ws, std::span<const double> dz, std::span<double> grad) const {
    if (static_cast<int>(dz.size()) != sizes_.back()) {
        throw std::invalid_argument("output-gradient dimension mismatch");
    }
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("gradient buffer size mismatch");
    }
    std::copy(dz.begin(), dz.end(), ws.delta.begin());

    for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params_.data() + w_off_[l];
        double* gw = grad.data() + w_off_[l];
        double* gb = grad.data() + b_off_[l];
        const double* src = ws.act[l].data();

        for (int j = 0; j < out; ++j) {
            const double d = ws.delta[static_cast<std::size_t>(j)];
            double* grow = gw + static_cast<std::size_t>(j) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i) grow[i] += d * src[i];
            gb[j] += d;
        }
        if (l == 0) break;

        // propagate through tanh: act stores the post-activation value
        for (int i = 0; i < in; ++i) {
            double s = 0.0;
            for (int j = 0; j < out; ++j) {
                s += w[static_cast<std::size_t>(j) * static_cast<std::size_t>(in) + i] *
                     ws.delta[static_cast<std::size_t>(j)];
            }
            const double a = src[i];
            ws.delta_prev[static_cast<std::size_t>(i)] = s * (1.0 - a * a);
        }
        std::swap(ws.delta, ws.delta_prev);
    }
}

}  // namespace a2er
