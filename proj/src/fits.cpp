#include "boolcd/fits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

#include "least_squares.hpp"

namespace boolcd {

namespace {

double sse_exp(std::span<const double> y, double phi_inf, double amplitude, double tau) {
    double sse = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double r = y[k] - (phi_inf + amplitude * std::exp(-static_cast<double>(k) / tau));
        sse += r * r;
    }
    return sse;
}

}  // namespace

FitResult fit_exponential(std::span<const double> curve) {
    if (curve.size() < 10) throw std::invalid_argument("fit_exponential: need >= 10 points");
    for (double v : curve)
        if (!std::isfinite(v)) throw std::invalid_argument("fit_exponential: non-finite value");

    FitResult fit;
    fit.model = FitModel::exp_decay;
    const std::size_t len = curve.size();

    // plateau estimate: mean of the last 5% of the curve
    const std::size_t tail_start = std::min(len - 1, (len * 95) / 100);
    double plateau = 0.0;
    for (std::size_t k = tail_start; k < len; ++k) plateau += curve[k];
    plateau /= static_cast<double>(len - tail_start);

    double max_excess = 0.0;
    for (std::size_t k = 0; k < len; ++k) max_excess = std::max(max_excess, curve[k] - plateau);
    double mean = 0.0;
    for (double v : curve) mean += v;
    mean /= static_cast<double>(len);
    double total_var = 0.0;
    for (double v : curve) total_var += (v - mean) * (v - mean);

    fit.phi_inf = plateau;
    if (max_excess <= 0.0 || total_var == 0.0 ||
        max_excess <= 1e-12 * std::max(std::abs(plateau), 1.0)) {
        fit.degenerate = true;  // flat curve: decay rate undefined
        fit.r_squared = total_var == 0.0 ? 1.0 : 0.0;
        return fit;
    }

    // log-residual regression on the early, above-plateau part of the curve
    std::vector<double> ks, logs;
    const double floor = 1e-4 * max_excess;
    for (std::size_t k = 0; k < len; ++k) {
        const double excess = curve[k] - plateau;
        if (excess > floor) {
            ks.push_back(static_cast<double>(k));
            logs.push_back(std::log(excess));
        }
    }
    if (ks.size() < 3) {
        fit.degenerate = true;
        return fit;
    }
    const detail::LineFit line = detail::least_squares_line(ks, logs);
    if (line.slope >= 0.0) {
        fit.degenerate = true;  // not a decay
        return fit;
    }
    double amplitude = std::exp(line.intercept);
    double tau = -1.0 / line.slope;
    double phi_inf = plateau;

    // one damped Gauss-Newton refinement pass over all three parameters
    double sse = sse_exp(curve, phi_inf, amplitude, tau);
    for (int iteration = 0; iteration < 60; ++iteration) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < len; ++k) {
            const double e = std::exp(-static_cast<double>(k) / tau);
            const double r = curve[k] - (phi_inf + amplitude * e);
            Eigen::Vector3d j(1.0, e, amplitude * e * static_cast<double>(k) / (tau * tau));
            jtj += j * j.transpose();
            jtr += j * r;
        }
        Eigen::Vector3d delta = jtj.ldlt().solve(jtr);
        if (!delta.allFinite()) break;
        double damping = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30; ++half) {
            const double p = phi_inf + damping * delta[0];
            const double a = amplitude + damping * delta[1];
            const double t = tau + damping * delta[2];
            if (t > 0.0 && a > 0.0) {
                const double candidate = sse_exp(curve, p, a, t);
                if (candidate < sse) {
                    phi_inf = p;
                    amplitude = a;
                    tau = t;
                    sse = candidate;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if (!accepted || delta.norm() <= 1e-14 * (std::abs(tau) + std::abs(amplitude))) break;
    }

    fit.phi_inf = phi_inf;
    fit.amplitude = amplitude;
    fit.tau = tau;
    fit.r_squared = total_var > 0.0 ? 1.0 - sse / total_var : 1.0;
    fit.residual_std = std::sqrt(sse / static_cast<double>(len));
    return fit;
}

FitResult fit_power_law(std::span<const double> sizes, std::span<const double> k_means) {
    if (sizes.size() != k_means.size())
        throw std::invalid_argument("fit_power_law: length mismatch");
    if (sizes.size() < 3) throw std::invalid_argument("fit_power_law: need >= 3 points");
    std::vector<double> log_n, log_k;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(sizes[i] > 0.0)) throw std::invalid_argument("fit_power_law: nonpositive size");
        if (!(k_means[i] > 0.0)) throw std::invalid_argument("fit_power_law: nonpositive K");
        log_n.push_back(std::log(sizes[i]));
        log_k.push_back(std::log(k_means[i]));
    }
    const detail::LineFit line = detail::least_squares_line(log_n, log_k);
    FitResult fit;
    fit.model = FitModel::power_law;
    fit.exponent = line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.r_squared = line.r_squared;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        const double r = log_k[i] - (line.intercept + line.slope * log_n[i]);
        ss_res += r * r;
    }
    fit.residual_std = std::sqrt(ss_res / static_cast<double>(log_n.size()));
    return fit;
}

std::string fit_to_json(const FitResult& fit) {
    nlohmann::json j;
    if (fit.model == FitModel::exp_decay) {
        j["model"] = "exp_decay";
        j["phi_inf"] = fit.phi_inf;
        j["amplitude"] = fit.amplitude;
        j["tau"] = fit.tau;
    } else {
        j["model"] = "power_law";
        j["prefactor"] = fit.prefactor;
        j["exponent"] = fit.exponent;
    }
    j["r_squared"] = fit.r_squared;
    j["residual_std"] = fit.residual_std;
    j["degenerate"] = fit.degenerate;
    return j.dump(2);
}

}  // namespace boolcd
