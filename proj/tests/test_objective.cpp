#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "boolcd/objective.hpp"
#include "boolcd/rng.hpp"
#include "oracle_helpers.hpp"

using namespace boolcd;

namespace {

StateMatrix small_matrix() {
    Eigen::MatrixXd e(2, 2);
    e << 1, 2, 3, 4;
    return StateMatrix(e);
}

BooleanWeights bits(std::initializer_list<int> vals) {
    std::vector<std::uint8_t> b;
    for (int v : vals) b.push_back(static_cast<std::uint8_t>(v));
    return BooleanWeights(b);
}

}  // namespace

TEST_CASE("readout selects and sums columns") {
    const StateMatrix e = small_matrix();
    CHECK(readout(e, bits({1, 0})) == Eigen::Vector2d(1, 3));
    CHECK(readout(e, bits({1, 1})) == Eigen::Vector2d(3, 7));
    CHECK(readout(e, bits({0, 0})) == Eigen::Vector2d(0, 0));
    CHECK_THROWS_AS(readout(e, bits({1, 0, 1})), std::invalid_argument);
}

TEST_CASE("mse worked examples") {
    const StateMatrix e = small_matrix();
    CHECK(mse(e, bits({1, 0}), Eigen::Vector2d(1, 3)) == 0.0);
    CHECK(mse(e, bits({1, 0}), Eigen::Vector2d(1, 0)) == doctest::Approx(4.5));  // (0 + 9) / 2
    CHECK(mse(e, bits({0, 0}), Eigen::Vector2d(1, 1)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mse(e, bits({1, 0}), Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
}

TEST_CASE("spin and boolean conventions agree: T*mse + eta*N/2 == phi_spin") {
    const StateMatrix e = small_matrix();
    const Eigen::Vector2d target(1, 0);
    const Objective obj(e, target, 0.37);
    for (std::uint32_t idx = 0; idx < 4; ++idx) {
        const BooleanWeights w = oracle::weights_from_index(idx, 2);
        const double lhs = 2.0 * obj.mse(w) + 0.37 * 2.0 / 2.0;
        const double rhs = obj.phi_spin(spin_of(w));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("convention bridge holds exhaustively at N = 12") {
    const Objective obj = oracle::random_instance(12, 8, 2024, 0.2, 0.01);
    const double t = static_cast<double>(obj.horizon());
    const double shift = obj.eta() * 12.0 / 2.0;
    for (std::uint32_t idx = 0; idx < (1u << 12); ++idx) {
        const BooleanWeights w = oracle::weights_from_index(idx, 12);
        const double lhs = t * obj.mse(w) + shift;
        const double rhs = obj.phi_spin(spin_of(w));
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("phi is zero at an exactly representable point and never below eta*N/2") {
    Eigen::MatrixXd e = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    // target = E/2 * 1 + A x for x = (+1,-1): residual vanishes there
    const Eigen::Vector2d target(2, 0);
    const Objective obj(StateMatrix(e), target, 0.0);
    std::vector<std::int8_t> spins{1, -1};
    CHECK(obj.phi_spin(SpinVector(spins)) == doctest::Approx(0.0));

    const Objective shifted(StateMatrix(e), target, 0.8);
    Rng rng(5);
    for (int k = 0; k < 50; ++k) {
        const std::uint32_t idx = rng.uniform_index(4);
        CHECK(shifted.phi_spin(round_to_hypercube(oracle::spin_from_index(idx, 2).eval())) >=
              0.8 * 2.0 / 2.0 - 1e-12);
    }
}

TEST_CASE("grad_phi matches central differences at 100 random points") {
    const Objective obj = oracle::random_instance(10, 24, 77);
    Rng rng(123);
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd x(10);
        for (int i = 0; i < 10; ++i) x[i] = 4.0 * rng.uniform01() - 2.0;
        const Eigen::VectorXd fd = oracle::fd_gradient(obj, x);
        const Eigen::VectorXd an = obj.grad_phi(x);
        CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-5);
    }
}

TEST_CASE("gradient vanishes at the unconstrained minimizer") {
    const Objective obj = oracle::random_instance(6, 16, 42, 0.2, 0.05);
    const Eigen::MatrixXd a_half = obj.half_matrix();
    const Eigen::MatrixXd hess =
        2.0 * a_half.transpose() * a_half + obj.eta() * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd rhs = 2.0 * a_half.transpose() * obj.offset();
    const Eigen::VectorXd x_star = hess.ldlt().solve(rhs);
    CHECK(obj.grad_phi(x_star).norm() <= 1e-9);

    Eigen::MatrixXd e = Eigen::MatrixXd::Ones(3, 2);
    const Objective zero_eta(StateMatrix(e), 0.5 * e.rowwise().sum(), 0.0);  // a = 0
    CHECK(zero_eta.grad_phi(Eigen::Vector2d(0, 0)).norm() == 0.0);
}

TEST_CASE("lambda_max on diagonal and identity matrices") {
    CHECK(lambda_max(StateMatrix(Eigen::MatrixXd::Identity(2, 2))).raw == doctest::Approx(1.0));
    Eigen::MatrixXd d(2, 2);
    d << 3, 0, 0, 4;
    const LambdaMax lm = lambda_max(StateMatrix(d), 0.25);
    CHECK(lm.raw == doctest::Approx(16.0));
    CHECK(lm.hessian == doctest::Approx(8.25));
}

TEST_CASE("lambda_max matches a dense eigensolver on a random 50x50 matrix") {
    const StateMatrix m = random_state_matrix(50, 50, EntryDistribution::uniform01, 31);
    const double expected = oracle::dense_lambda_max(m.values());
    CHECK(lambda_max(m).raw == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("round_to_hypercube is the exact euclidean projection") {
    CHECK(round_to_hypercube(Eigen::Vector2d(0.3, -2.0)) ==
          SpinVector(std::vector<std::int8_t>{1, -1}));
    CHECK(round_to_hypercube(Eigen::Vector2d(0.0, 0.0)) ==
          SpinVector(std::vector<std::int8_t>{1, 1}));  // documented tie rule

    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd a(8);
        for (int i = 0; i < 8; ++i) a[i] = 6.0 * rng.uniform01() - 3.0;
        const SpinVector rounded = round_to_hypercube(a);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_idx = 0;
        for (std::uint32_t idx = 0; idx < 256; ++idx) {
            const double d = (a - oracle::spin_from_index(idx, 8)).squaredNorm();
            if (d < best) {
                best = d;
                best_idx = idx;
            }
        }
        CHECK(rounded.to_real() == oracle::spin_from_index(best_idx, 8));
    }
}

TEST_CASE("smoothness, strong convexity and descent lemma certificates") {
    const Objective obj = oracle::random_instance(12, 24, 2718, 0.2, 0.2);
    const double lambda = lambda_max(obj.state()).raw;  // theorem's constant
    REQUIRE(obj.eta() <= 0.5 * lambda);                 // hessian <= lambda holds
    Rng rng(999);
    auto draw = [&]() {
        Eigen::VectorXd x(12);
        for (int i = 0; i < 12; ++i) x[i] = 4.0 * rng.uniform01() - 2.0;
        return x;
    };
    for (int k = 0; k < 1000; ++k) {
        const Eigen::VectorXd x = draw(), z = draw();
        const Eigen::VectorXd gx = obj.grad_phi(x);
        // lambda-smoothness
        CHECK((gx - obj.grad_phi(z)).norm() <= lambda * (x - z).norm() * (1.0 + 1e-12));
        // descent lemma
        CHECK(obj.phi(z) <=
              obj.phi(x) + gx.dot(z - x) + 0.5 * lambda * (z - x).squaredNorm() + 1e-9);
        // eta-strong convexity
        CHECK(obj.phi(z) >=
              obj.phi(x) + gx.dot(z - x) + 0.5 * obj.eta() * (z - x).squaredNorm() - 1e-9);
    }
}

TEST_CASE("al-kashi identity") {
    Rng rng(314);
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXd g(6), y(6);
        for (int i = 0; i < 6; ++i) {
            g[i] = 2.0 * rng.uniform01() - 1.0;
            y[i] = 2.0 * rng.uniform01() - 1.0;
        }
        const double t = 0.1 + 5.0 * rng.uniform01();
        const double lhs = g.dot(y) + 0.5 * t * y.squaredNorm();
        const double rhs =
            0.5 * t * (y + g / t).squaredNorm() - 0.5 / t * g.squaredNorm();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("theory constants serialize to the documented json keys") {
    TheoryConstants c{10.0, 0.1, 0.5, 0.9, 1.0, 1.0};
    const std::string text = c.to_json();
    for (const char* key : {"lambda", "eta", "kappa", "rho", "alpha", "beta"})
        CHECK(text.find(key) != std::string::npos);
    const TheoryConstants back = TheoryConstants::from_json(text);
    CHECK(back.lambda_smooth == 10.0);
    CHECK(back.rho == 0.9);
}

TEST_CASE("default eta is lambda-relative") {
    const StateMatrix m = random_state_matrix(8, 16, EntryDistribution::uniform01, 4);
    CHECK(default_eta(m) ==
          doctest::Approx(1e-3 * lambda_max(m).raw / 8.0).epsilon(1e-9));
}
