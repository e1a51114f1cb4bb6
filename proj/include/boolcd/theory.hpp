#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boolcd/descent.hpp"
#include "boolcd/objective.hpp"
#include "boolcd/reservoir.hpp"
#include "boolcd/weights.hpp"

namespace boolcd {

/// Objective small enough to enumerate: phi values of all 2^N spin vectors
/// are cached at construction (N <= 16, T <= 32).
class SmallInstance {
public:
    explicit SmallInstance(Objective obj);

    const Objective& objective() const { return obj_; }
    int n() const { return obj_.n(); }
    std::uint32_t states() const { return static_cast<std::uint32_t>(phi_.size()); }

    double phi(std::uint32_t index) const { return phi_[index]; }
    /// bit i of `index` set => coordinate i is +1
    SpinVector spin_at(std::uint32_t index) const;
    std::uint32_t index_of(const SpinVector& x) const;
    std::uint32_t flip(std::uint32_t index, int coordinate) const {
        return index ^ (1u << coordinate);
    }

private:
    Objective obj_;
    std::vector<double> phi_;
};

/// Exact set of local coordinatewise minimizers (no single flip decreases phi).
std::vector<SpinVector> local_minimizers(const SmallInstance& inst);

enum class SimplexMode { exact_vertex, uniform_only };

struct KappaResult {
    double kappa = 0.0;          // constraint x' != Pi(x), i.e. x' != x
    double kappa_variant = 0.0;  // constraint x' != Pi(x - grad/lambda)
    bool degenerate = false;     // kappa <= 0 (reported, not clamped unless infinite)
    bool infinite_ratio = false; // some vertex ratio diverged; kappa clamped at 0
    double lambda = 0.0;         // lambda_max(E^t E) used in the gradient step
};

/// kappa = 1 - max over x, x' and pi in the simplex of
///   || D(sqrt(pi)) (Pi(x - grad/lambda) - x + grad/lambda) ||
///   / || D(sqrt(pi)) (x' - x + grad/lambda) ||.
/// The pi-max is exact: the squared ratio is linear-fractional in pi, so it
/// peaks at a simplex vertex, i.e. at max_i |num_i| / |den_i| (den_i = 0 with
/// num_i != 0 gives an infinite ratio; 0/0 coordinates are skipped).
/// uniform_only restricts pi to the uniform distribution.
KappaResult kappa(const SmallInstance& inst, SimplexMode mode = SimplexMode::exact_vertex);

struct RhoResult {
    double rho = 0.0;
    bool vacuous = false;  // rho outside (0,1): the bound proves nothing
    double pi_inf = 0.0;   // ||pi||_inf used in the formula
    double pi_inf_stderr = 0.0;  // Monte-Carlo error (greedy only)
};

/// rho = kappa * (1 - ||pi||_inf * (lambda(1-kappa)/eta) * (eta/(2N) - 1)).
/// Markovian: ||pi||_inf = 1/N exactly. Greedy: empirical max selection
/// frequency over `calibration_epochs` draws, with its standard error.
RhoResult rho(const SmallInstance& inst, const SelectorPolicy& policy, const KappaResult& kap,
              int calibration_epochs = 20000);

/// Exact one-step conditional expectation of phi from `index`: each
/// coordinate i is proposed with probability pi_i and kept only if it
/// strictly lowers phi.
double one_step_expectation(const SmallInstance& inst, std::uint32_t index,
                            const Eigen::VectorXd& pi);

struct ContractionReport {
    double rho = 0.0;
    bool rho_vacuous = false;
    double kappa = 0.0;
    double kappa_variant = 0.0;
    double worst_ratio = 0.0;       // max over steps of (E[phi(next)] - phi(xbar)) / (phi(x) - phi(xbar))
    double fraction_satisfied = 0.0;  // fraction of steps with ratio <= rho
    long steps_checked = 0;
    long steps_excluded = 0;  // states equal to the run's fixed point
    int trials = 0;
};

/// Re-runs n_trials descents and checks the exact one-step conditional
/// expectation E_k[phi(x^(k+1))] = sum_i pi_i * (flip-i outcome) against the
/// theorem's contraction factor, with xbar each run's own fixed point.
ContractionReport verify_contraction(const SmallInstance& inst, const SelectorPolicy& policy,
                                     int n_trials);

struct BetaEstimate {
    double beta = 0.0;
    double ci_low = 0.0;   // 95% interval from the regression slope error
    double ci_high = 0.0;
    double r_squared = 0.0;
    std::vector<double> median_lambda;  // per size
};

/// Log-log slope of median lambda_max vs N over T=N instances. `center`
/// subtracts the global empirical mean first, matching the centered-ensemble
/// growth (sqrt(N)+sqrt(T))^2; raw moments are dominated by the rank-one mean
/// component instead.
BetaEstimate estimate_beta(const std::vector<int>& sizes, EntryDistribution distribution,
                           int trials, std::uint64_t seed, bool center = true);

/// Same regression with a caller-supplied matrix source (e.g. closed-form
/// rank-one fixtures).
BetaEstimate estimate_beta_with(
    const std::vector<int>& sizes,
    const std::function<StateMatrix(int n, int t, int trial)>& generate, int trials,
    bool center = true);

/// K ~ log(1/eps) / log(1/rho); throws unless rho and eps are in (0,1).
double predicted_epochs(double eps, double rho);
/// Companion scaling form K ~ log(1/eps) * N^(1 + alpha - beta).
double predicted_epochs_scaling(double eps, int n, double alpha, double beta);

/// Report JSON with keys kappa, kappa_variant, rho, rho_vacuous, worst_ratio,
/// fraction_satisfied, beta, beta_ci, notes[].
std::string theory_report_json(const KappaResult& kap, const RhoResult& rho,
                               const ContractionReport& contraction, const BetaEstimate& beta,
                               const std::vector<std::string>& notes);

}  // namespace boolcd
