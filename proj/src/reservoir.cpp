#include "boolcd/reservoir.hpp"

#include <cmath>
#include <stdexcept>

#include "boolcd/rng.hpp"

namespace boolcd {

void ReservoirConfig::validate() const {
    if (n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
    if (!(leak_rate > 0.0 && leak_rate <= 1.0))
        throw std::invalid_argument("leak_rate must be in (0,1]");
    if (!(connectivity > 0.0 && connectivity <= 1.0))
        throw std::invalid_argument("connectivity must be in (0,1]");
    if (!(spectral_radius >= 0.0)) throw std::invalid_argument("spectral_radius must be >= 0");
    if (!std::isfinite(input_scale)) throw std::invalid_argument("input_scale must be finite");
}

namespace {

/// |largest eigenvalue| of a dense matrix, estimated from the norm growth
/// rate of repeated application. Robust to complex leading pairs, which a
/// plain power iteration is not.
double spectral_radius_estimate(const Eigen::MatrixXd& w, std::uint64_t seed) {
    const Eigen::Index n = w.rows();
    Rng rng(seed);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    v.normalize();
    constexpr int kWarmup = 192;
    constexpr int kMeasure = 64;
    double log_sum = 0.0;
    for (int it = 0; it < kWarmup + kMeasure; ++it) {
        Eigen::VectorXd next = w * v;
        const double norm = next.norm();
        if (norm == 0.0 || !std::isfinite(norm)) return 0.0;
        if (it >= kWarmup) log_sum += std::log(norm);
        v = next / norm;
    }
    return std::exp(log_sum / kMeasure);
}

}  // namespace

ReservoirWeights build_reservoir_weights(const ReservoirConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_nodes;
    std::uint64_t seq = cfg.seed;
    Rng rec_rng(derive_seed(splitmix64(seq), 0x7265637572ULL));
    Rng in_rng(derive_seed(splitmix64(seq), 0x696e707574ULL));

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = rec_rng.uniform01();
            const double g = rec_rng.gaussian();  // drawn unconditionally: keeps the
            if (u < cfg.connectivity) w(i, j) = g;  // stream layout independent of hits
        }

    double radius = spectral_radius_estimate(w, derive_seed(cfg.seed, 0x726164ULL));
    if (radius > 0.0 && cfg.spectral_radius > 0.0) {
        w *= cfg.spectral_radius / radius;
    }

    Eigen::VectorXd win(n);
    for (int i = 0; i < n; ++i) win[i] = cfg.input_scale * (2.0 * in_rng.uniform01() - 1.0);
    return ReservoirWeights{std::move(w), std::move(win), radius};
}

StateMatrix drive_reservoir(const ReservoirConfig& cfg, std::span<const double> input,
                            int washout) {
    cfg.validate();
    if (washout < 0) throw std::invalid_argument("washout must be >= 0");
    const long horizon = static_cast<long>(input.size()) - washout;
    if (horizon < 1)
        throw std::invalid_argument("input too short: need at least washout+1 samples, got " +
                                    std::to_string(input.size()));

    const ReservoirWeights weights = build_reservoir_weights(cfg);
    const int n = cfg.n_nodes;
    Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd out(horizon, n);
    const double a = cfg.leak_rate;
    for (long t = 0; t < static_cast<long>(input.size()); ++t) {
        Eigen::VectorXd pre = weights.recurrent * state + weights.input * input[t];
        state = (1.0 - a) * state + a * pre.array().tanh().matrix();
        if (t >= washout) out.row(t - washout) = state.array().square();
    }
    return StateMatrix(std::move(out));
}

EntryDistribution entry_distribution_from_string(const std::string& name) {
    if (name == "uniform01") return EntryDistribution::uniform01;
    if (name == "abs_gaussian") return EntryDistribution::abs_gaussian;
    if (name == "squared_gaussian") return EntryDistribution::squared_gaussian;
    throw std::invalid_argument("unknown entry distribution: " + name);
}

std::string to_string(EntryDistribution d) {
    switch (d) {
        case EntryDistribution::uniform01: return "uniform01";
        case EntryDistribution::abs_gaussian: return "abs_gaussian";
        case EntryDistribution::squared_gaussian: return "squared_gaussian";
    }
    throw std::logic_error("unreachable");
}

double entry_variance(EntryDistribution d) {
    switch (d) {
        case EntryDistribution::uniform01: return 1.0 / 12.0;
        case EntryDistribution::abs_gaussian: return 1.0 - 2.0 / 3.14159265358979323846;
        case EntryDistribution::squared_gaussian: return 2.0;  // var of chi^2_1
    }
    throw std::logic_error("unreachable");
}

StateMatrix random_state_matrix(int n, int t, EntryDistribution distribution,
                                std::uint64_t seed) {
    if (n < 1 || t < 1) throw std::invalid_argument("matrix dimensions must be >= 1");
    Rng rng(derive_seed(seed, 0x6d6174726978ULL, static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd m(t, n);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < n; ++j) {
            switch (distribution) {
                case EntryDistribution::uniform01: m(i, j) = rng.uniform01(); break;
                case EntryDistribution::abs_gaussian: m(i, j) = std::abs(rng.gaussian()); break;
                case EntryDistribution::squared_gaussian: {
                    const double g = rng.gaussian();
                    m(i, j) = g * g;
                    break;
                }
            }
        }
    return StateMatrix(std::move(m));
}

}  // namespace boolcd
