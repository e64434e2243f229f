#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace a2er {

// Fully connected net with tanh hidden layers and an identity output layer.
// Parameters live in one flat vector (per layer: row-major weight matrix, then
// bias), which keeps the optimizer, checkpointing, and finite-difference
// checks trivial.
class Mlp {
public:
    explicit Mlp(std::vector<int> sizes);

    // The benchmark architecture: two hidden layers of 32 units.
    static Mlp make_default(int input_dim, int output_dim) {
        return Mlp({input_dim, 32, 32, output_dim});
    }

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }

    std::size_t param_count() const { return params_.size(); }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    void init_xavier(std::mt19937_64& rng);

    // Scratch space for a cached forward pass; reusable across records.
    struct Workspace {
        std::vector<std::vector<double>> act;  // act[0] = input, act.back() = output
        std::vector<double> delta, delta_prev;
    };
    Workspace make_workspace() const;

    // Throws std::invalid_argument on dimension mismatch or non-finite input.
    std::vector<double> forward(std::span<const double> x) const;
    void forward(std::span<const double> x, Workspace& ws) const;

    // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
    void backward(Workspace& ws, std::span<const double> dz, std::span<double> grad) const;

private:
    std::vector<int> sizes_;
    std::vector<double> params_;
    std::vector<std::size_t> w_off_, b_off_;  // per-layer offsets into params_
};

}  // namespace a2er
