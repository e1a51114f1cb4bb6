#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

#include "boolcd/state_matrix.hpp"
#include "boolcd/weights.hpp"

namespace boolcd {

/// Detector output: component n is sum_i w_i * E[n,i] (proportionality
/// constant fixed to 1).
Eigen::VectorXd readout(const StateMatrix& state, const BooleanWeights& w);

/// Mean-square error (1/T) * ||target - readout||^2.
double mse(const StateMatrix& state, const BooleanWeights& w, const Eigen::VectorXd& target);

/// Elementwise nearest point of {-1,+1}^N; a coordinate at exactly 0 rounds
/// to +1.
SpinVector round_to_hypercube(const Eigen::VectorXd& a);

struct LambdaMax {
    double raw = 0.0;      // lambda_max(E^t E)
    double hessian = 0.0;  // lambda_max(2 A^t A + eta I) = raw/2 + eta
    int iterations = 0;
};

struct PowerIterationError : std::runtime_error {
    PowerIterationError(const std::string& what, double estimate)
        : std::runtime_error(what), last_estimate(estimate) {}
    double last_estimate;
};

/// Largest eigenvalue of E^t E by power iteration (relative tolerance 1e-8,
/// at most 1e5 iterations). Throws PowerIterationError carrying the last
/// estimate on non-convergence.
LambdaMax lambda_max(const StateMatrix& state, double eta = 0.0);

/// eta = 1e-3 * lambda_max(E^t E) / N; keeps the strong-convexity shift small
/// relative to the curvature without touching the hypercube minimizers.
double default_eta(const StateMatrix& state);

/// Quadratic readout objective in the spin convention:
///     phi(x) = ||a - A x||^2 + (eta/2) ||x||^2,
/// with a = target - E 1 / 2 and A = E / 2. On the hypercube the eta term is
/// the constant eta*N/2, so T * mse(W) + eta*N/2 == phi_spin(spin_of(W)).
class Objective {
public:
    Objective(StateMatrix state, Eigen::VectorXd target);              // default eta
    Objective(StateMatrix state, Eigen::VectorXd target, double eta);  // explicit eta

    const StateMatrix& state() const { return state_; }
    const Eigen::VectorXd& target() const { return target_; }
    const Eigen::VectorXd& offset() const { return offset_; }  // a
    Eigen::MatrixXd half_matrix() const { return 0.5 * state_.values(); }
    double eta() const { return eta_; }
    int n() const { return static_cast<int>(state_.nodes()); }
    Eigen::Index horizon() const { return state_.horizon(); }

    double phi_spin(const SpinVector& x) const;
    /// phi extended to R^N (used by gradient checks and the rounding step).
    double phi(const Eigen::VectorXd& x) const;
    /// Exact gradient of phi: -2 A^t (a - A x) + eta x.
    Eigen::VectorXd grad_phi(const Eigen::VectorXd& x) const;

    double mse(const BooleanWeights& w) const;

private:
    StateMatrix state_;
    Eigen::VectorXd target_;
    Eigen::VectorXd offset_;
    double eta_;
};

/// Contraction constants of one instance, serializable to JSON with keys
/// lambda, eta, kappa, rho, alpha, beta.
struct TheoryConstants {
    double lambda_smooth = 0.0;  // lambda_max(E^t E)
    double eta = 0.0;
    double kappa = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    std::string to_json() const;
    static TheoryConstants from_json(const std::string& text);
};

}  // namespace boolcd
