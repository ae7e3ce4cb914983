#include "doctest.h"

#include "oqw/lattice.hpp"
#include "oqw/linalg.hpp"
#include "oqw/zoo.hpp"
#include "test_helpers.hpp"

#include <cstdlib>
#include <map>

using namespace oqw;
using testutil::scalar_model;

TEST_CASE("normalization: reference line walk is exactly normalized") {
    const WalkModel model = zoo::paper_line_walk();
    CHECK(normalization_residual(model) <= 1e-12);
}

TEST_CASE("normalization: scalar lazy walk") {
    const WalkModel model = scalar_model(0.5, 0.25, 0.25);
    CHECK(normalization_residual(model) <= 1e-15);
}

TEST_CASE("normalization: discretized circle build, residual measured directly") {
    zoo::CircleParams p;  // gamma 0.1, nbar 1, lambda 0.3, n_y 1, delta 0.05
    const WalkModel model = zoo::build_circle(p);
    // independent evaluation of sum A^dag A - I
    Matrix S = -Matrix::Identity(2, 2);
    for (const auto& A : model.ops) S += A.adjoint() * A;
    const double direct = S.cwiseAbs().maxCoeff();
    CHECK(normalization_residual(model) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct <= 10.0 * p.delta * p.delta);
    CHECK(direct > 0.0);  // the discretization is not exact
}

TEST_CASE("model construction errors name the offending operator") {
    const Matrix I2 = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(make_walk_model(1, {I2, I2}, 1e-12), StructuralError);
    CHECK_THROWS_WITH_AS(make_walk_model(1, {I2, I2, Matrix::Identity(3, 3)}, 1e-12),
                         doctest::Contains("operator 2"), StructuralError);
    Matrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_WITH_AS(make_walk_model(1, {I2, rect, I2}, 1e-12),
                         doctest::Contains("operator 1"), StructuralError);
}

TEST_CASE("coin map: scalar identity") {
    const WalkModel model = scalar_model(0.5, 0.25, 0.25);
    Matrix tau(1, 1);
    tau << 1.0;
    CHECK(std::abs(apply_coin_map(model, tau)(0, 0) - Complex(1.0)) <= 1e-15);
}

TEST_CASE("coin map: printed steady state is an approximate fixed point") {
    const WalkModel model = zoo::paper_line_walk();
    const Matrix rho = testutil::mat2(0.5, Complex(0.375, -0.217), Complex(0.375, 0.217), 0.5);
    CHECK(linalg::max_abs(apply_coin_map(model, rho) - rho) <= 1e-3);
}

TEST_CASE("coin map: one step from the mixed state matches direct arithmetic") {
    const WalkModel model = zoo::paper_line_walk();
    const Matrix tau = maximally_mixed(2);
    // oracle: unrolled entrywise sum over j, rows, columns
    Matrix expect = Matrix::Zero(2, 2);
    for (int j = 0; j < 3; ++j) {
        const Matrix& A = model.op(j);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        expect(r, c) += A(r, k) * tau(k, l) * std::conj(A(c, l));
    }
    const Matrix got = apply_coin_map(model, tau);
    CHECK(linalg::max_abs(got - expect) <= 1e-15);
    CHECK(std::abs(got.trace().real() - 1.0) <= 1e-12);
    CHECK(linalg::max_abs(got - got.adjoint()) <= 1e-15);
}

TEST_CASE("step_lattice: fully lazy walk leaves the state unchanged") {
    const WalkModel model = testutil::fully_lazy_model();
    const LatticeState init = default_initial_state(model);
    const LatticeState next = step_lattice(model, init);
    CHECK(next.step_count == 1);
    REQUIRE(next.sites.size() == 1);
    CHECK(linalg::max_abs(next.sites.at(Site{0}) - init.sites.at(Site{0})) == 0.0);
}

TEST_CASE("step_lattice: two classical steps convolve the step law") {
    const WalkModel model = scalar_model(0.5, 0.25, 0.25);
    const auto dist =
        position_distribution(evolve(model, default_initial_state(model), 2));
    const std::map<std::int64_t, double> expect{
        {-2, 1.0 / 16}, {-1, 1.0 / 4}, {0, 3.0 / 8}, {1, 1.0 / 4}, {2, 1.0 / 16}};
    REQUIRE(dist.probs.size() == expect.size());
    for (const auto& [x, p] : expect)
        CHECK(dist.probs.at(Site{x}) == doctest::Approx(p).epsilon(0).scale(1e-12));
}

TEST_CASE("evolve: zero steps is the identity") {
    const WalkModel model = zoo::paper_line_walk();
    const LatticeState init = default_initial_state(model);
    const LatticeState same = evolve(model, init, 0);
    CHECK(same.step_count == init.step_count);
    CHECK(testutil::max_block_diff(same.sites, init.sites) == 0.0);
}

TEST_CASE("evolve: line walk at n=100 is centered with Gaussian-like spread") {
    const WalkModel model = zoo::paper_line_walk();
    const auto dist = position_distribution(evolve(model, default_initial_state(model), 100));
    const auto mom = distribution_moments(dist);
    CHECK(std::abs(mom.mean[0]) <= 1e-10);
    CHECK(std::abs(dist.total() - 1.0) <= 1e-10);
    // fourth-moment ratio of a Gaussian is 3
    double m4 = 0.0;
    for (const auto& [x, p] : dist.probs)
        m4 += p * std::pow(static_cast<double>(x[0]) - mom.mean[0], 4);
    CHECK(m4 / (mom.cov(0, 0) * mom.cov(0, 0)) == doctest::Approx(3.0).epsilon(0).scale(0.1));
}

TEST_CASE("evolve: six steps equal the branch-sequence brute force") {
    const WalkModel model = zoo::paper_line_walk();
    const auto expect = testutil::brute_force_branches(model, maximally_mixed(2), 6);
    const auto got = evolve(model, default_initial_state(model), 6);
    CHECK(testutil::max_block_diff(got.sites, expect) <= 1e-10);
}

TEST_CASE("evolve: dense line path and generic path agree") {
    const WalkModel model = zoo::paper_line_walk();
    LatticeState generic = default_initial_state(model);
    for (int t = 0; t < 25; ++t) generic = step_lattice(model, generic);
    const LatticeState dense = evolve(model, default_initial_state(model), 25);
    CHECK(testutil::max_block_diff(dense.sites, generic.sites) <= 1e-13);
}

TEST_CASE("position distribution sums to one and matches reference rows") {
    const WalkModel model = zoo::paper_line_walk();
    // variance over steps with the first application counted as step zero
    const auto at = [&](std::uint64_t n) {
        const auto dist =
            position_distribution(evolve(model, default_initial_state(model), n + 1));
        CHECK(std::abs(dist.total() - 1.0) <= 1e-10);
        return distribution_moments(dist).cov(0, 0) / static_cast<double>(n);
    };
    CHECK(at(10) == doctest::Approx(1.08333).epsilon(0).scale(1e-5));
    CHECK(at(100) == doctest::Approx(1.04583).epsilon(0).scale(1e-5));
}

TEST_CASE("distribution moments: classical two-step walk") {
    const WalkModel model = scalar_model(0.5, 0.25, 0.25);
    const auto mom =
        distribution_moments(position_distribution(evolve(model, default_initial_state(model), 2)));
    CHECK(std::abs(mom.mean[0]) <= 1e-14);
    CHECK(mom.cov(0, 0) == doctest::Approx(1.0).epsilon(0).scale(1e-12));
}

TEST_CASE("classical reduction: D=1 evolution is exactly the n-fold convolution") {
    const WalkModel model = scalar_model(0.4, 0.35, 0.25);
    const auto expect = testutil::convolved_walk(0.4, 0.35, 0.25, 8);
    const auto dist = position_distribution(evolve(model, default_initial_state(model), 8));
    REQUIRE(dist.probs.size() == expect.size());
    for (const auto& [x, p] : expect)
        CHECK(dist.probs.at(Site{x}) == doctest::Approx(p).epsilon(0).scale(1e-12));
}

TEST_CASE("trace is preserved stepwise and positivity holds") {
    const WalkModel model = zoo::paper_line_walk();
    LatticeState state = default_initial_state(model);
    for (int t = 0; t < 200; ++t) {
        const double before = state.total_trace();
        state = step_lattice(model, state);
        CHECK(std::abs(state.total_trace() - before) <= 1e-12);
    }
    CHECK(std::abs(state.total_trace() - 1.0) <= 1e-10);
    for (const auto& [x, tau] : state.sites)
        CHECK(linalg::min_eigenvalue(tau) >= -1e-10);
}

TEST_CASE("trace preservation on a random exactly-normalized 2D model") {
    const WalkModel model = testutil::random_cptp_model(2, 2, 424242);
    LatticeState state = default_initial_state(model);
    for (int t = 0; t < 30; ++t) {
        const double before = state.total_trace();
        state = step_lattice(model, state);
        CHECK(std::abs(state.total_trace() - before) <= 1e-12);
    }
    for (const auto& [x, tau] : state.sites)
        CHECK(linalg::min_eigenvalue(tau) >= -1e-10);
}

TEST_CASE("one application of the full map kills position coherences") {
    // three sites on the line with all nine D=2 blocks populated; the full map
    // in block form is M(rho) = sum_{i,j} A_j tau_{kl} A_j^dag placed at
    // (i+e_j, i+e_j) with weight <i|k><l|i>
    const WalkModel model = zoo::paper_line_walk();
    std::map<std::pair<std::int64_t, std::int64_t>, Matrix> blocks;
    for (std::int64_t k = -1; k <= 1; ++k)
        for (std::int64_t l = -1; l <= 1; ++l) {
            Matrix block = testutil::mat2(Complex(0.1 * (k + 2), 0.02 * l),
                                          Complex(0.03, 0.01 * (k - l)),
                                          Complex(0.03, -0.01 * (k - l)),
                                          Complex(0.1 * (l + 2), -0.02 * k));
            blocks[{k, l}] = block;
        }
    // normalize the diagonal trace
    double tr = 0.0;
    for (std::int64_t k = -1; k <= 1; ++k) tr += blocks[{k, k}].trace().real();
    for (auto& [key, b] : blocks) b /= tr;

    std::map<std::pair<std::int64_t, std::int64_t>, Matrix> mapped;
    for (std::int64_t i = -2; i <= 2; ++i)
        for (std::int64_t ip = -2; ip <= 2; ++ip) mapped[{i, ip}] = Matrix::Zero(2, 2);
    for (std::int64_t i = -1; i <= 1; ++i) {      // source position
        for (int j = 0; j < 3; ++j) {             // jump branch
            const std::int64_t target = i + model.displacement(j)[0];
            for (std::int64_t k = -1; k <= 1; ++k)
                for (std::int64_t l = -1; l <= 1; ++l) {
                    const double weight = (i == k && l == i) ? 1.0 : 0.0;  // <i|k><l|i>
                    if (weight == 0.0) continue;
                    mapped[{target, target}] +=
                        model.op(j) * blocks[{k, l}] * model.op(j).adjoint();
                }
        }
    }
    // off-diagonal blocks of the mapped state vanish identically
    for (const auto& [key, b] : mapped)
        if (key.first != key.second) CHECK(linalg::max_abs(b) == 0.0);

    // and the diagonal agrees with step_lattice on the diagonal part
    LatticeState diag;
    diag.d = 1;
    diag.D = 2;
    for (std::int64_t k = -1; k <= 1; ++k) diag.sites[Site{k}] = blocks[{k, k}];
    const LatticeState stepped = step_lattice(model, diag);
    for (const auto& [x, tau] : stepped.sites)
        CHECK(linalg::max_abs(tau - mapped[{x[0], x[0]}]) <= 1e-14);
}

TEST_CASE("step_lattice is bitwise reproducible across worker counts") {
    const WalkModel model = zoo::paper_line_walk();
    const auto run = [&](const char* threads) {
        setenv("OQW_THREADS", threads, 1);
        LatticeState state = default_initial_state(model);
        for (int t = 0; t < 40; ++t) state = step_lattice(model, state);
        unsetenv("OQW_THREADS");
        return state;
    };
    const LatticeState serial = run("1");
    const LatticeState parallel = run("4");
    REQUIRE(serial.sites.size() == parallel.sites.size());
    CHECK(testutil::max_block_diff(serial.sites, parallel.sites) == 0.0);
}
