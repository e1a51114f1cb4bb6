#pragma once

// Independent oracles for the unit and acceptance suites. Everything here
// recomputes results through a different route than the library code under
// test (dense eigensolvers, finite differences, exhaustive enumeration,
// straight-line scalar loops).

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "boolcd/objective.hpp"
#include "boolcd/reservoir.hpp"
#include "boolcd/rng.hpp"
#include "boolcd/state_matrix.hpp"
#include "boolcd/tasks.hpp"
#include "boolcd/weights.hpp"

namespace oracle {

/// lambda_max(E^t E) via a full dense symmetric eigendecomposition.
inline double dense_lambda_max(const Eigen::MatrixXd& e) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.transpose() * e);
    return es.eigenvalues().maxCoeff();
}

/// Central-difference gradient of obj.phi at x.
inline Eigen::VectorXd fd_gradient(const boolcd::Objective& obj, const Eigen::VectorXd& x,
                                   double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (obj.phi(hi) - obj.phi(lo)) / (2.0 * h);
    }
    return g;
}

/// All-spin enumeration helpers (bit i set => +1).
inline Eigen::VectorXd spin_from_index(std::uint32_t index, int n) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (index >> i) & 1u ? 1.0 : -1.0;
    return x;
}

inline boolcd::BooleanWeights weights_from_index(std::uint32_t index, int n) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (index >> i) & 1u;
    return boolcd::BooleanWeights(std::move(bits));
}

/// True iff no single-bit flip strictly lowers the mse.
inline bool is_local_min_exhaustive(const boolcd::StateMatrix& state,
                                    const Eigen::VectorXd& target,
                                    const boolcd::BooleanWeights& w) {
    const double base = boolcd::mse(state, w, target);
    boolcd::BooleanWeights probe = w;
    for (int i = 0; i < w.size(); ++i) {
        probe.flip(i);
        if (boolcd::mse(state, probe, target) < base) return false;
        probe.flip(i);
    }
    return true;
}

/// Straight-line scalar re-simulation of drive_reservoir: plain loops over
/// nodes, no Eigen products.
inline std::vector<std::vector<double>> scalar_reservoir(const boolcd::ReservoirConfig& cfg,
                                                         const std::vector<double>& input,
                                                         int washout) {
    const boolcd::ReservoirWeights weights = boolcd::build_reservoir_weights(cfg);
    const int n = cfg.n_nodes;
    std::vector<double> state(static_cast<std::size_t>(n), 0.0);
    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < input.size(); ++t) {
        std::vector<double> next(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double pre = weights.input[i] * input[t];
            for (int j = 0; j < n; ++j) pre += weights.recurrent(i, j) * state[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(i)] =
                (1.0 - cfg.leak_rate) * state[static_cast<std::size_t>(i)] +
                cfg.leak_rate * std::tanh(pre);
        }
        state = next;
        if (static_cast<long>(t) >= washout) {
            std::vector<double> squared(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                squared[static_cast<std::size_t>(i)] =
                    state[static_cast<std::size_t>(i)] * state[static_cast<std::size_t>(i)];
            rows.push_back(std::move(squared));
        }
    }
    return rows;
}

/// Random small instance: uniform01 states with a noisy planted target.
inline boolcd::Objective random_instance(int n, int t, std::uint64_t seed, double noise = 0.3,
                                         double eta_scale = -1.0) {
    const boolcd::StateMatrix states =
        boolcd::random_state_matrix(n, t, boolcd::EntryDistribution::uniform01, seed);
    const Eigen::VectorXd target = boolcd::synthetic_target(
        states, boolcd::BooleanWeights::random(n, seed ^ 0x5555AAAAULL), noise,
        seed ^ 0x1234ULL);
    if (eta_scale < 0.0) return boolcd::Objective(states, target);
    return boolcd::Objective(states, target, eta_scale * boolcd::lambda_max(states).raw);
}

/// Dense simplex-grid maximum of ||D(sqrt(pi)) num|| / ||D(sqrt(pi)) den||
/// for N = 2 or 3 (includes the simplex vertices).
inline double grid_ratio_max(const Eigen::VectorXd& num, const Eigen::VectorXd& den,
                             int points_per_edge) {
    const int n = static_cast<int>(num.size());
    double best = 0.0;
    auto eval = [&](const Eigen::VectorXd& pi) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < n; ++i) {
            a += pi[i] * num[i] * num[i];
            b += pi[i] * den[i] * den[i];
        }
        if (b == 0.0) {
            if (a > 0.0) best = std::numeric_limits<double>::infinity();
            return;
        }
        best = std::max(best, std::sqrt(a / b));
    };
    if (n == 2) {
        for (int i = 0; i <= points_per_edge; ++i) {
            const double t = static_cast<double>(i) / points_per_edge;
            eval(Eigen::Vector2d(t, 1.0 - t));
        }
    } else if (n == 3) {
        for (int i = 0; i <= points_per_edge; ++i)
            for (int j = 0; j <= points_per_edge - i; ++j) {
                const double a = static_cast<double>(i) / points_per_edge;
                const double b = static_cast<double>(j) / points_per_edge;
                eval(Eigen::Vector3d(a, b, 1.0 - a - b));
            }
    } else {
        throw std::invalid_argument("grid oracle supports N=2,3");
    }
    return best;
}

}  // namespace oracle
