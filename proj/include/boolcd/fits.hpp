#pragma once

#include <span>
#include <string>

namespace boolcd {

enum class FitModel { exp_decay, power_law };

struct FitResult {
    FitModel model = FitModel::exp_decay;
    // exp_decay: value(k) = phi_inf + amplitude * exp(-k / tau)
    double phi_inf = 0.0;
    double amplitude = 0.0;
    double tau = 0.0;
    // power_law: value(n) = prefactor * n^exponent
    double prefactor = 0.0;
    double exponent = 0.0;

    double r_squared = 0.0;
    double residual_std = 0.0;
    bool degenerate = false;  // flat or invalid input; rate/exponent undefined
};

/// Fits phi_inf + A exp(-k/tau) to a mean convergence curve: plateau estimate
/// (mean of the last 5%), log-residual linear regression, then one damped
/// Gauss-Newton pass over all three parameters.
FitResult fit_exponential(std::span<const double> mean_curve);

/// Log-log linear regression of K against N; r_squared is that of the log fit.
FitResult fit_power_law(std::span<const double> sizes, std::span<const double> k_means);

std::string fit_to_json(const FitResult& fit);

}  // namespace boolcd
