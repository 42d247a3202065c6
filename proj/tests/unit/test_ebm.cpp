#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rebmbo/ebm.hpp"

using namespace rebmbo;
namespace ebm = rebmbo::ebm;
namespace net = rebmbo::net;

namespace {

ebm::EbmConfig small_config() {
    ebm::EbmConfig c;
    c.hidden = 16;
    c.inner = 12;
    return c;
}

Matrix bimodal(const Vector& a, const Vector& b, double sd, Eigen::Index n, Rng& rng) {
    Matrix X(n, a.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector& c = i % 2 == 0 ? a : b;
        for (Eigen::Index j = 0; j < a.size(); ++j) X(i, j) = c[j] + sd * standard_normal(rng);
    }
    return X;
}

}  // namespace

TEST_CASE("energy is deterministic and matches the network") {
    const Box box(Vector{{-2.0, 0.0}}, Vector{{3.0, 10.0}});
    const auto m = ebm::make_energy_model(box, small_config(), 3);
    const auto m2 = ebm::make_energy_model(box, small_config(), 3);
    Rng rng(1);
    const Matrix X = latin_hypercube(box, 30, rng);
    const Vector E = ebm::energy_batch(m, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Vector x = X.row(i).transpose();
        CHECK(ebm::energy(m, x) == ebm::energy(m2, x));
        CHECK(ebm::energy(m, x) == doctest::Approx(E[i]).epsilon(1e-13));
        CHECK(ebm::energy(m, x) == net::forward(m.net, box.to_symmetric(x))[0]);
    }
    CHECK_THROWS_AS(ebm::energy(m, Vector::Zero(3)), InputError);
}

TEST_CASE("zero network gives zero energy and gradient") {
    const Box box(2, 0.0, 1.0);
    auto m = ebm::make_energy_model(box, small_config(), 1);
    for (auto& l : m.net.layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
    const Vector x{{0.3, 0.9}};
    CHECK(ebm::energy(m, x) == 0.0);
    CHECK(ebm::energy_input_grad(m, x).norm() == 0.0);
}

TEST_CASE("input and parameter gradients match finite differences") {
    const Box box(Vector{{-5.0, 0.0, 1.0}}, Vector{{10.0, 15.0, 2.0}});
    auto cfg = small_config();
    cfg.blocks = 2;
    auto m = ebm::make_energy_model(box, cfg, 7);
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Vector x = latin_hypercube(box, 1, rng).row(0).transpose();
        const Vector g = ebm::energy_input_grad(m, x);
        const Vector fd = testing::central_diff([&] { return ebm::energy(m, x); }, x.data(), x.size(), 1e-6);
        CHECK(testing::grad_error(g, fd) < 1e-6);

        // A constant offset on the read-out bias leaves the gradient alone.
        m.net.layers.back().bias[0] += 3.0;
        CHECK((ebm::energy_input_grad(m, x) - g).norm() < 1e-12);
        m.net.layers.back().bias[0] -= 3.0;
    }

    const Matrix pos = latin_hypercube(box, 5, rng), neg = latin_hypercube(box, 4, rng);
    const auto grads = ebm::contrastive_gradient(m, pos, neg);
    auto loss = [&] { return ebm::energy_batch(m, pos).mean() - ebm::energy_batch(m, neg).mean(); };
    CHECK(testing::check_param_grads(m.net, loss, grads) < 1e-5);
}

TEST_CASE("noise-free chain on a quadratic contracts by 1 - eta per step") {
    Rng rng(3);
    Matrix U = testing::uniform_matrix(3, 5, rng, -1, 1);
    const Matrix init = U;
    ebm::LangevinConfig cfg{20, 0.1, 0.0};
    const auto r = ebm::langevin_chain([](const Matrix& V) { return V; }, U, cfg, rng, std::nullopt);
    const double factor = std::pow(0.9, 20);
    CHECK((r.samples - factor * init).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(r.samples.col(j).norm() == doctest::Approx(factor * init.col(j).norm()).epsilon(1e-13));
    CHECK(r.reinitialized == 0);
}

TEST_CASE("zero gradient at zero temperature leaves samples in place") {
    Rng rng(4);
    const Matrix U = testing::uniform_matrix(2, 7, rng, -1, 1);
    const auto r = ebm::langevin_chain([](const Matrix& V) { return Matrix::Zero(V.rows(), V.cols()); }, U,
                                       ebm::LangevinConfig{20, 0.01, 0.0}, rng);
    CHECK(r.samples == U);
}

TEST_CASE("unit-temperature chain samples the standard normal") {
    Rng rng(5);
    const Matrix U = Matrix::Zero(2, 400);
    const auto r = ebm::langevin_chain([](const Matrix& V) { return V; }, U, ebm::LangevinConfig{2000, 0.01, 1.0}, rng,
                                       std::nullopt);
    const double m2 = r.samples.array().square().mean();
    CHECK(std::abs(m2 - 1.0) < 0.15);
}

TEST_CASE("divergent chains are redrawn inside the bounds") {
    Rng rng(6);
    const Matrix U = Matrix::Constant(2, 3, 0.5);
    const auto r = ebm::langevin_chain([](const Matrix& V) { return -1e8 * V; }, U, ebm::LangevinConfig{3, 0.1, 0.0},
                                       rng, std::nullopt);
    CHECK(r.reinitialized > 0);
    CHECK(r.samples.allFinite());

    const Box box(2, 0.0, 4.0);
    const auto m = ebm::make_energy_model(box, small_config(), 2);
    const auto s = ebm::langevin_sample(m, 50, rng);
    CHECK(s.samples.rows() == 50);
    for (Eigen::Index i = 0; i < 50; ++i) CHECK(box.contains(s.samples.row(i).transpose()));
}

TEST_CASE("identical positive and negative batches cancel") {
    const Box box(2, -1.0, 1.0);
    auto m = ebm::make_energy_model(box, small_config(), 8);
    const auto before = m.net.layers;
    Rng rng(7);
    const Matrix X = latin_hypercube(box, 10, rng);
    const auto g = ebm::contrastive_gradient(m, X, X);
    CHECK(g.squared_norm() == 0.0);
    ebm::train_step_with_negatives(m, X, X);
    for (std::size_t l = 0; l < before.size(); ++l) CHECK(m.net.layers[l].weight == before[l].weight);
}

TEST_CASE("a single step lowers data energy on most fresh models") {
    const Box box(2, 0.0, 1.0);
    int lowered = 0;
    const int trials = 50;
    for (int s = 0; s < trials; ++s) {
        auto cfg = small_config();
        auto m = ebm::make_energy_model(box, cfg, 100 + s);
        Rng rng(200 + s);
        const Matrix X = bimodal(Vector{{0.2, 0.2}}, Vector{{0.8, 0.7}}, 0.05, 64, rng);
        const double e0 = ebm::energy_batch(m, X).mean();
        ebm::train_step(m, X, rng);
        if (ebm::energy_batch(m, X).mean() < e0) ++lowered;
    }
    CHECK(lowered >= 0.8 * trials);
}

TEST_CASE("training puts the modes below the background") {
    const Box box(2, 0.0, 10.0);
    int wins = 0;
    for (int s = 0; s < 5; ++s) {
        auto cfg = small_config();
        cfg.hidden = 32;
        cfg.inner = 32;
        cfg.learning_rate = 1e-3;
        auto m = ebm::make_energy_model(box, cfg, s);
        Rng rng(50 + s);
        const Vector a{{2.5, 2.5}}, b{{7.5, 7.0}};
        const Matrix data = bimodal(a, b, 0.5, 256, rng).cwiseMax(0.0).cwiseMin(10.0);
        const auto diags = ebm::train_epochs(m, data, 75, 64, rng);
        CHECK(diags.size() == 300);
        Matrix bg(256, 2);
        for (Eigen::Index i = 0; i < 256; ++i) bg.row(i) = box.from_unit(testing::uniform_matrix(2, 1, rng)).transpose();
        if (0.5 * (ebm::energy(m, a) + ebm::energy(m, b)) < ebm::energy_batch(m, bg).mean()) ++wins;
    }
    CHECK(wins >= 4);
}

TEST_CASE("epochs and batch truncation") {
    const Box box(1, 0.0, 1.0);
    auto m = ebm::make_energy_model(box, small_config(), 1);
    const auto before = m.net.layers[0].weight;
    Rng rng(1);
    const Matrix one = Matrix::Constant(1, 1, 0.4);
    CHECK(ebm::train_epochs(m, one, 0, 64, rng).empty());
    CHECK(m.net.layers[0].weight == before);
    const auto d = ebm::train_epochs(m, one, 3, 64, rng);
    CHECK(d.size() == 3);
    CHECK(m.train_steps == 3);
    CHECK(ebm::train_epochs(m, Matrix::Constant(10, 1, 0.5), 2, 4, rng).size() == 6);
    CHECK_THROWS_AS(ebm::train_epochs(m, one, 1, 0, rng), ParameterError);
}

TEST_CASE("min-max energy normalization") {
    const auto v = ebm::normalize_energies(std::vector<double>{1, 2, 3});
    CHECK(v == std::vector<double>{0, 0.5, 1});
    CHECK(ebm::normalize_energies(std::vector<double>{5, 5}) == std::vector<double>{0.5, 0.5});
    const Vector x{{0.3, -2.0, 4.0, 1.1}};
    const Vector a = ebm::normalize_energies(x), b = ebm::normalize_energies(Vector(3.0 * x.array() + 7.0));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
    const auto s = ebm::EnergyScale::from(x);
    CHECK(s(-2.0) == 0.0);
    CHECK(s(4.0) == 1.0);
    CHECK(s(7.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(ebm::normalize_energies(Vector()), InputError);
}

TEST_CASE("config validation") {
    ebm::EbmConfig c;
    c.langevin.steps = 0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = {};
    c.learning_rate = 0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = {};
    c.langevin.temperature = -1;
    CHECK_THROWS_AS(ebm::make_energy_model(Box(1, 0.0, 1.0), c, 0), ParameterError);
}
