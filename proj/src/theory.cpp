#include "boolcd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "boolcd/rng.hpp"
#include "least_squares.hpp"

namespace boolcd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SmallInstance::SmallInstance(Objective obj) : obj_(std::move(obj)) {
    if (obj_.n() > 16) throw std::invalid_argument("SmallInstance: N must be <= 16");
    if (obj_.horizon() > 32) throw std::invalid_argument("SmallInstance: T must be <= 32");
    const std::uint32_t count = 1u << obj_.n();
    phi_.resize(count);
    Eigen::VectorXd x(obj_.n());
    for (std::uint32_t idx = 0; idx < count; ++idx) {
        for (int i = 0; i < obj_.n(); ++i) x[i] = (idx >> i) & 1u ? 1.0 : -1.0;
        phi_[idx] = obj_.phi(x);
    }
}

SpinVector SmallInstance::spin_at(std::uint32_t index) const {
    std::vector<std::int8_t> spins(static_cast<std::size_t>(obj_.n()));
    for (int i = 0; i < obj_.n(); ++i)
        spins[static_cast<std::size_t>(i)] = (index >> i) & 1u ? 1 : -1;
    return SpinVector(std::move(spins));
}

std::uint32_t SmallInstance::index_of(const SpinVector& x) const {
    if (x.size() != obj_.n()) throw std::invalid_argument("index_of: dimension mismatch");
    std::uint32_t idx = 0;
    for (int i = 0; i < x.size(); ++i)
        if (x.spin(i) > 0) idx |= 1u << i;
    return idx;
}

std::vector<SpinVector> local_minimizers(const SmallInstance& inst) {
    std::vector<SpinVector> result;
    const int n = inst.n();
    for (std::uint32_t idx = 0; idx < inst.states(); ++idx) {
        bool is_min = true;
        for (int i = 0; i < n && is_min; ++i)
            if (inst.phi(inst.flip(idx, i)) < inst.phi(idx)) is_min = false;
        if (is_min) result.push_back(inst.spin_at(idx));
    }
    return result;
}

namespace {

/// max over the simplex of ||D(sqrt(pi)) num|| / ||D(sqrt(pi)) den||.
/// The squared ratio is linear-fractional in pi, so it peaks at a vertex:
/// max_i |num_i|/|den_i|, skipping 0/0 coordinates; a coordinate with
/// den_i = 0 and num_i != 0 yields +inf.
double vertex_ratio(const Eigen::VectorXd& num, const Eigen::VectorXd& den) {
    double best = -1.0;
    for (Eigen::Index i = 0; i < num.size(); ++i) {
        const double n = std::abs(num[i]);
        const double d = std::abs(den[i]);
        if (d == 0.0) {
            if (n > 0.0) return kInf;
            continue;  // 0/0: no mass on this coordinate at the maximizer
        }
        best = std::max(best, n / d);
    }
    return best < 0.0 ? 0.0 : best;  // all coordinates skipped: ratio vacuously 0
}

double uniform_ratio(const Eigen::VectorXd& num, const Eigen::VectorXd& den) {
    const double dn = den.norm();
    const double nn = num.norm();
    if (dn == 0.0) return nn > 0.0 ? kInf : 0.0;
    return nn / dn;
}

}  // namespace

KappaResult kappa(const SmallInstance& inst, SimplexMode mode) {
    const int n = inst.n();
    if (n > 12) throw std::invalid_argument("kappa: N must be <= 12");
    const Objective& obj = inst.objective();
    const double lambda = lambda_max(obj.state(), obj.eta()).raw;
    if (lambda <= 0.0) throw std::invalid_argument("kappa: zero smoothness constant");

    double max_main = 0.0;
    double max_variant = 0.0;
    bool inf_main = false, inf_variant = false;

    Eigen::VectorXd x(n), num(n), den(n);
    for (std::uint32_t xi = 0; xi < inst.states(); ++xi) {
        for (int i = 0; i < n; ++i) x[i] = (xi >> i) & 1u ? 1.0 : -1.0;
        const Eigen::VectorXd g = obj.grad_phi(x) / lambda;
        const SpinVector rounded = round_to_hypercube(x - g);
        const std::uint32_t pi_idx = inst.index_of(rounded);
        for (int i = 0; i < n; ++i) num[i] = rounded.spin(i) - x[i] + g[i];

        for (std::uint32_t xp = 0; xp < inst.states(); ++xp) {
            const bool excl_main = xp == xi;       // x' != Pi(x), and Pi(x) = x on spins
            const bool excl_variant = xp == pi_idx;  // x' != Pi(x - grad/lambda)
            if (excl_main && excl_variant) continue;
            for (int i = 0; i < n; ++i) {
                const double xpi = (xp >> i) & 1u ? 1.0 : -1.0;
                den[i] = xpi - x[i] + g[i];
            }
            const double r = mode == SimplexMode::exact_vertex ? vertex_ratio(num, den)
                                                               : uniform_ratio(num, den);
            if (!excl_main) {
                if (std::isinf(r)) inf_main = true;
                else max_main = std::max(max_main, r);
            }
            if (!excl_variant) {
                if (std::isinf(r)) inf_variant = true;
                else max_variant = std::max(max_variant, r);
            }
        }
    }

    KappaResult result;
    result.lambda = lambda;
    result.infinite_ratio = inf_main;
    result.kappa = inf_main ? 0.0 : 1.0 - max_main;  // infinite ratio clamps at 0
    result.kappa_variant = inf_variant ? 0.0 : 1.0 - max_variant;
    result.degenerate = result.kappa <= 0.0;
    return result;
}

namespace {

struct PiEstimate {
    Eigen::VectorXd frequencies;
    double max_frequency = 0.0;
    double stderr_max = 0.0;
};

PiEstimate empirical_pi(const SelectorPolicy& policy, int n, int draws) {
    CoordinateSelector selector(policy, n);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < draws; ++k) counts[selector.select()] += 1.0;
    PiEstimate est;
    est.frequencies = counts / static_cast<double>(draws);
    est.max_frequency = est.frequencies.maxCoeff();
    est.stderr_max =
        std::sqrt(est.max_frequency * (1.0 - est.max_frequency) / static_cast<double>(draws));
    return est;
}

}  // namespace

RhoResult rho(const SmallInstance& inst, const SelectorPolicy& policy, const KappaResult& kap,
              int calibration_epochs) {
    if (!std::isfinite(kap.kappa)) throw std::invalid_argument("rho: missing kappa");
    const int n = inst.n();
    RhoResult result;
    if (policy.kind == PolicyKind::markovian) {
        result.pi_inf = 1.0 / static_cast<double>(n);
        result.pi_inf_stderr = 0.0;
    } else {
        const PiEstimate est = empirical_pi(policy, n, calibration_epochs);
        result.pi_inf = est.max_frequency;
        result.pi_inf_stderr = est.stderr_max;
    }
    const double eta = inst.objective().eta();
    if (eta <= 0.0) throw std::invalid_argument("rho: eta must be positive");
    const double k = kap.kappa;
    result.rho = k * (1.0 - result.pi_inf * (kap.lambda * (1.0 - k) / eta) *
                                (eta / (2.0 * n) - 1.0));
    result.vacuous = !(result.rho > 0.0 && result.rho < 1.0);
    return result;
}

double one_step_expectation(const SmallInstance& inst, std::uint32_t index,
                            const Eigen::VectorXd& pi) {
    if (pi.size() != inst.n()) throw std::invalid_argument("pi length must equal N");
    const double phi_x = inst.phi(index);
    double expectation = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
        const double phi_flip = inst.phi(inst.flip(index, i));
        expectation += pi[i] * (phi_flip < phi_x ? phi_flip : phi_x);
    }
    return expectation;
}

ContractionReport verify_contraction(const SmallInstance& inst, const SelectorPolicy& policy,
                                     int n_trials) {
    const int n = inst.n();
    if (n > 12) throw std::invalid_argument("verify_contraction: N must be <= 12");
    if (n_trials < 1) throw std::invalid_argument("verify_contraction: need >= 1 trial");

    const KappaResult kap = kappa(inst);
    const RhoResult r = rho(inst, policy, kap);

    // conditional selection distribution: exact for markovian, the empirical
    // aggregate for greedy (the greedy chain is non-stationary)
    Eigen::VectorXd pi;
    if (policy.kind == PolicyKind::markovian) {
        pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    } else {
        pi = empirical_pi(policy, n, 20000).frequencies;
    }

    ContractionReport report;
    report.rho = r.rho;
    report.rho_vacuous = r.vacuous;
    report.kappa = kap.kappa;
    report.kappa_variant = kap.kappa_variant;
    report.worst_ratio = -kInf;
    report.trials = n_trials;
    long satisfied = 0;

    for (int trial = 0; trial < n_trials; ++trial) {
        DescentConfig cfg;
        cfg.policy = policy;
        cfg.policy.rng_seed = derive_seed(policy.rng_seed, 0x747269616cULL,
                                          static_cast<std::uint64_t>(trial));
        cfg.max_epochs = 4000 * n;
        cfg.stop_on_local_min = true;
        const BooleanWeights w0 =
            BooleanWeights::random(n, derive_seed(policy.rng_seed, 0x7730ULL,
                                                  static_cast<std::uint64_t>(trial)));
        const DescentTrace trace = run_descent(inst.objective(), w0, cfg);
        const std::uint32_t xbar = inst.index_of(spin_of(trace.final_weights));
        const double phi_bar = inst.phi(xbar);

        std::uint32_t idx = inst.index_of(spin_of(w0));
        for (std::size_t k = 1; k < trace.records.size(); ++k) {
            if (idx == xbar) {
                ++report.steps_excluded;  // theorem assumes x^(k) != xbar
            } else {
                const double phi_x = inst.phi(idx);
                const double expectation = one_step_expectation(inst, idx, pi);
                const double ratio = (expectation - phi_bar) / (phi_x - phi_bar);
                report.worst_ratio = std::max(report.worst_ratio, ratio);
                if (ratio <= report.rho + 1e-12) ++satisfied;
                ++report.steps_checked;
            }
            if (trace.records[k].reward == 1)
                idx = inst.flip(idx, trace.records[k].flipped_index);
        }
    }
    report.fraction_satisfied =
        report.steps_checked > 0 ? static_cast<double>(satisfied) /
                                       static_cast<double>(report.steps_checked)
                                 : 1.0;
    if (report.worst_ratio == -kInf) report.worst_ratio = 0.0;
    return report;
}

namespace {

/// lambda_max(M^t M) for a dense (possibly signed) matrix by power iteration.
double dense_gram_lambda_max(const Eigen::MatrixXd& m) {
    Rng rng(0xC0FFEEULL);
    Eigen::VectorXd v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd mv = m.transpose() * (m * v);
        const double next = v.dot(mv);
        const double norm = mv.norm();
        if (norm == 0.0) return 0.0;
        v = mv / norm;
        if (it > 0 && std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300)) return next;
        lambda = next;
    }
    return lambda;
}

}  // namespace

BetaEstimate estimate_beta(const std::vector<int>& sizes, EntryDistribution distribution,
                           int trials, std::uint64_t seed, bool center) {
    return estimate_beta_with(
        sizes,
        [&](int n, int t, int trial) {
            return random_state_matrix(n, t, distribution,
                                       derive_seed(seed, static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(trial)));
        },
        trials, center);
}

BetaEstimate estimate_beta_with(
    const std::vector<int>& sizes,
    const std::function<StateMatrix(int n, int t, int trial)>& generate, int trials,
    bool center) {
    if (sizes.size() < 3)
        throw std::invalid_argument("estimate_beta: need at least 3 sizes, got " +
                                    std::to_string(sizes.size()));
    if (trials < 1) throw std::invalid_argument("estimate_beta: trials must be >= 1");

    BetaEstimate est;
    std::vector<double> log_n, log_lambda;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int n = sizes[si];
        if (n < 2) throw std::invalid_argument("estimate_beta: sizes must be >= 2");
        std::vector<double> lambdas;
        lambdas.reserve(static_cast<std::size_t>(trials));
        for (int trial = 0; trial < trials; ++trial) {
            const StateMatrix m = generate(n, n, trial);
            if (center) {
                Eigen::MatrixXd c = m.values().array() - m.values().mean();
                lambdas.push_back(dense_gram_lambda_max(c));
            } else {
                lambdas.push_back(lambda_max(m).raw);
            }
        }
        std::sort(lambdas.begin(), lambdas.end());
        const std::size_t mid = lambdas.size() / 2;
        const double median = lambdas.size() % 2 ? lambdas[mid]
                                                 : 0.5 * (lambdas[mid - 1] + lambdas[mid]);
        if (!(median > 0.0)) throw std::invalid_argument("degenerate regression: zero median lambda");
        est.median_lambda.push_back(median);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_lambda.push_back(std::log(median));
    }
    const detail::LineFit fit = detail::least_squares_line(log_n, log_lambda);
    est.beta = fit.slope;
    est.ci_low = fit.slope - 2.0 * fit.slope_stderr;  // ~95% normal interval
    est.ci_high = fit.slope + 2.0 * fit.slope_stderr;
    est.r_squared = fit.r_squared;
    return est;
}

double predicted_epochs(double eps, double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("predicted_epochs: rho must be in (0,1)");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("predicted_epochs: eps must be in (0,1)");
    return std::log(1.0 / eps) / std::log(1.0 / rho);
}

double predicted_epochs_scaling(double eps, int n, double alpha, double beta) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("predicted_epochs_scaling: eps must be in (0,1)");
    if (n < 1) throw std::invalid_argument("predicted_epochs_scaling: n must be >= 1");
    return std::log(1.0 / eps) * std::pow(static_cast<double>(n), 1.0 + alpha - beta);
}

std::string theory_report_json(const KappaResult& kap, const RhoResult& rho_result,
                               const ContractionReport& contraction, const BetaEstimate& beta,
                               const std::vector<std::string>& notes) {
    nlohmann::json j;
    j["kappa"] = kap.kappa;
    j["kappa_variant"] = kap.kappa_variant;
    j["kappa_degenerate"] = kap.degenerate;
    j["lambda"] = kap.lambda;
    j["rho"] = rho_result.rho;
    j["rho_vacuous"] = rho_result.vacuous;
    j["pi_inf"] = rho_result.pi_inf;
    j["pi_inf_stderr"] = rho_result.pi_inf_stderr;
    j["worst_ratio"] = contraction.worst_ratio;
    j["fraction_satisfied"] = contraction.fraction_satisfied;
    j["steps_checked"] = contraction.steps_checked;
    j["steps_excluded"] = contraction.steps_excluded;
    j["beta"] = beta.beta;
    j["beta_ci"] = {beta.ci_low, beta.ci_high};
    j["notes"] = notes;
    return j.dump(2);
}

}  // namespace boolcd
