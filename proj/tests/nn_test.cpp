#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "a2er/heads.hpp"
#include "a2er/mlp.hpp"
#include "a2er/optimizer.hpp"
#include "a2er/rng.hpp"

using namespace a2er;

namespace {

// central finite differences over the flat parameter vector; the independent
// oracle for every analytic gradient below
std::vector<double> fd_gradient(Mlp& model, const std::function<double()>& loss,
                                double step = 1e-5) {
    std::vector<double> grad(model.param_count());
    auto params = model.params();
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + step;
        const double up = loss();
        params[i] = keep - step;
        const double down = loss();
        params[i] = keep;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

void check_close(const std::vector<double>& analytic, const std::vector<double>& fd,
                 double rel = 1e-4, double abs = 1e-6) {
    REQUIRE(analytic.size() == fd.size());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(fd[i]), 1.0});
        REQUIRE(std::abs(analytic[i] - fd[i]) <= rel * scale + abs);
    }
}

}  // namespace

TEST_CASE("zero parameters map everything to zero") {
    Mlp model({3, 4, 2});
    const auto z = model.forward(std::vector<double>{1.0, -2.0, 0.5});
    CHECK(z == std::vector<double>{0.0, 0.0});
}

TEST_CASE("forward is deterministic under a fixed seed") {
    Mlp a = Mlp::make_default(2, 5);
    Mlp b = Mlp::make_default(2, 5);
    auto rng_a = make_rng(2024);
    auto rng_b = make_rng(2024);
    a.init_xavier(rng_a);
    b.init_xavier(rng_b);
    const std::vector<double> x{0.3, -0.7};
    CHECK(a.forward(x) == b.forward(x));
}

TEST_CASE("forward rejects bad input") {
    Mlp model({2, 3, 1});
    CHECK_THROWS(model.forward(std::vector<double>{1.0}));
    CHECK_THROWS(model.forward(std::vector<double>{1.0, std::nan("")}));
}

TEST_CASE("backward matches finite differences on single outputs") {
    auto rng = make_rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        Mlp model({3, 6, 5, 2});
        model.init_xavier(rng);
        const std::vector<double> x{0.2, -0.4, 0.9};

        for (int coord = 0; coord < 2; ++coord) {
            std::vector<double> analytic(model.param_count(), 0.0);
            Mlp::Workspace ws = model.make_workspace();
            model.forward(x, ws);
            std::vector<double> dz(2, 0.0);
            dz[static_cast<std::size_t>(coord)] = 1.0;
            model.backward(ws, dz, analytic);

            auto fd = fd_gradient(model, [&] {
                return model.forward(x)[static_cast<std::size_t>(coord)];
            });
            check_close(analytic, fd);
        }
    }
}

TEST_CASE("gaussian nll closed form and gradient") {
    // mu = y, sigma = 1: nll = log(2 pi) / 2
    CHECK(nll(HeadKind::Gaussian, std::vector<double>{3.0, 0.0}, std::vector<double>{3.0}) ==
          doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));

    auto rng = make_rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> z{dist(rng), 0.5 * dist(rng)};
        const std::vector<double> y{dist(rng)};
        std::vector<double> dz(2);
        nll_grad(HeadKind::Gaussian, z, y, dz);
        for (int i = 0; i < 2; ++i) {
            std::vector<double> zp = z, zm = z;
            zp[static_cast<std::size_t>(i)] += 1e-6;
            zm[static_cast<std::size_t>(i)] -= 1e-6;
            const double fd = (nll(HeadKind::Gaussian, zp, y) - nll(HeadKind::Gaussian, zm, y)) / 2e-6;
            CHECK(dz[static_cast<std::size_t>(i)] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("categorical nll closed form and gradient") {
    // uniform logits over 4 classes: nll = log 4
    CHECK(nll(HeadKind::Categorical, std::vector<double>{0, 0, 0, 0}, std::vector<double>{2.0}) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK_THROWS(nll(HeadKind::Categorical, std::vector<double>{0, 0}, std::vector<double>{5.0}));
    CHECK_THROWS(nll(HeadKind::Categorical, std::vector<double>{0, 0}, std::vector<double>{-1.0}));

    auto rng = make_rng(13);
    std::normal_distribution<double> dist(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> z(5);
        for (double& v : z) v = dist(rng);
        const std::vector<double> y{static_cast<double>(trial % 5)};
        std::vector<double> dz(5);
        nll_grad(HeadKind::Categorical, z, y, dz);
        for (int i = 0; i < 5; ++i) {
            std::vector<double> zp = z, zm = z;
            zp[static_cast<std::size_t>(i)] += 1e-6;
            zm[static_cast<std::size_t>(i)] -= 1e-6;
            const double fd =
                (nll(HeadKind::Categorical, zp, y) - nll(HeadKind::Categorical, zm, y)) / 2e-6;
            CHECK(dz[static_cast<std::size_t>(i)] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("softmax sums to one") {
    auto rng = make_rng(15);
    std::uniform_real_distribution<double> dist(-30.0, 30.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> z(7);
        for (double& v : z) v = dist(rng);
        const auto p = softmax(z);
        double s = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("gaussian kld") {
    CHECK(kld_gaussian(0.7, 0.3, 0.7, 0.3) == doctest::Approx(0.0));
    CHECK(kld_gaussian(0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS(kld_gaussian(0.0, 0.0, 0.0, 1.0));
    CHECK_THROWS(kld_gaussian(0.0, 1.0, 0.0, -1.0));

    auto rng = make_rng(17);
    std::uniform_real_distribution<double> mu(-2.0, 2.0);
    std::uniform_real_distribution<double> sd(0.05, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double v = kld_gaussian(mu(rng), sd(rng), mu(rng), sd(rng));
        CHECK(v >= 0.0);
    }
}

TEST_CASE("optimizer leaves parameters alone on zero gradient") {
    Mlp model({2, 3, 1});
    auto rng = make_rng(19);
    model.init_xavier(rng);
    const std::vector<double> before(model.params().begin(), model.params().end());
    MomentOptimizer opt(model.param_count());
    const std::vector<double> zeros(model.param_count(), 0.0);
    CHECK(opt.step(model.params(), zeros));
    CHECK(std::vector<double>(model.params().begin(), model.params().end()) == before);
}

TEST_CASE("optimizer refuses non-finite gradients") {
    std::vector<double> params{1.0};
    std::vector<double> grads{std::numeric_limits<double>::infinity()};
    MomentOptimizer opt(1);
    CHECK(!opt.step(params, grads));
    CHECK(params[0] == 1.0);
}

TEST_CASE("optimizer moves against a constant gradient") {
    std::vector<double> params{0.0};
    const std::vector<double> grads{2.5};
    MomentOptimizer opt(1, 1e-2);
    for (int i = 0; i < 100; ++i) opt.step(params, grads);
    CHECK(params[0] < 0.0);
}

TEST_CASE("optimizer solves a scalar quadratic") {
    // minimize (x - 3)^2 from x = 0
    std::vector<double> params{0.0};
    MomentOptimizer opt(1, 1e-2);
    for (int i = 0; i < 5000; ++i) {
        const std::vector<double> grads{2.0 * (params[0] - 3.0)};
        opt.step(params, grads);
        if (std::abs(params[0] - 3.0) < 1e-3) break;
    }
    CHECK(std::abs(params[0] - 3.0) < 1e-3);
}
