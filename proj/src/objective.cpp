#include "boolcd/objective.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "boolcd/rng.hpp"

namespace boolcd {

Eigen::VectorXd readout(const StateMatrix& state, const BooleanWeights& w) {
    if (state.nodes() != w.size())
        throw std::invalid_argument("readout: weight length does not match node count");
    return state.values() * w.to_real();
}

double mse(const StateMatrix& state, const BooleanWeights& w, const Eigen::VectorXd& target) {
    if (target.size() != state.horizon())
        throw std::invalid_argument("mse: target length does not match horizon");
    const Eigen::VectorXd residual = target - readout(state, w);
    return residual.squaredNorm() / static_cast<double>(state.horizon());
}

SpinVector round_to_hypercube(const Eigen::VectorXd& a) {
    std::vector<std::int8_t> spins(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i])) throw std::invalid_argument("round_to_hypercube: non-finite input");
        spins[static_cast<std::size_t>(i)] = a[i] >= 0.0 ? 1 : -1;  // tie at 0 -> +1
    }
    return SpinVector(std::move(spins));
}

LambdaMax lambda_max(const StateMatrix& state, double eta) {
    const Eigen::MatrixXd& e = state.values();
    const Eigen::Index n = e.cols();
    Rng rng(0x9E3779B97F4A7C15ULL);  // fixed: lambda_max is a pure function of the matrix
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * rng.uniform01();
    v.normalize();

    constexpr double kTol = 1e-8;
    constexpr int kMaxIter = 100000;
    double lambda = 0.0;
    for (int it = 1; it <= kMaxIter; ++it) {
        Eigen::VectorXd mv = e.transpose() * (e * v);  // (E^t E) v without forming E^t E
        const double next = v.dot(mv);
        const double norm = mv.norm();
        if (norm == 0.0) return LambdaMax{0.0, eta, it};  // v in the null space: E^t E = 0
        mv /= norm;
        if (it > 1 && std::abs(next - lambda) <= kTol * std::max(next, 1e-300)) {
            return LambdaMax{next, 0.5 * next + eta, it};
        }
        lambda = next;
        v = mv;
    }
    throw PowerIterationError("power iteration did not reach 1e-8 relative tolerance", lambda);
}

double default_eta(const StateMatrix& state) {
    return 1e-3 * lambda_max(state).raw / static_cast<double>(state.nodes());
}

Objective::Objective(StateMatrix state, Eigen::VectorXd target)
    : Objective(std::move(state), std::move(target), -1.0) {
    eta_ = default_eta(state_);
}

Objective::Objective(StateMatrix state, Eigen::VectorXd target, double eta)
    : state_(std::move(state)), target_(std::move(target)), eta_(eta) {
    if (target_.size() != state_.horizon())
        throw std::invalid_argument("objective: target length does not match horizon");
    offset_ = target_ - 0.5 * state_.values().rowwise().sum();
}

double Objective::phi(const Eigen::VectorXd& x) const {
    if (x.size() != state_.nodes())
        throw std::invalid_argument("phi: dimension mismatch");
    const Eigen::VectorXd r = offset_ - 0.5 * (state_.values() * x);
    return r.squaredNorm() + 0.5 * eta_ * x.squaredNorm();
}

double Objective::phi_spin(const SpinVector& x) const { return phi(x.to_real()); }

Eigen::VectorXd Objective::grad_phi(const Eigen::VectorXd& x) const {
    if (x.size() != state_.nodes())
        throw std::invalid_argument("grad_phi: dimension mismatch");
    const Eigen::VectorXd r = offset_ - 0.5 * (state_.values() * x);
    return -(state_.values().transpose() * r) + eta_ * x;
}

double Objective::mse(const BooleanWeights& w) const { return boolcd::mse(state_, w, target_); }

std::string TheoryConstants::to_json() const {
    nlohmann::json j;
    j["lambda"] = lambda_smooth;
    j["eta"] = eta;
    j["kappa"] = kappa;
    j["rho"] = rho;
    j["alpha"] = alpha;
    j["beta"] = beta;
    return j.dump(2);
}

TheoryConstants TheoryConstants::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TheoryConstants c;
    c.lambda_smooth = j.at("lambda").get<double>();
    c.eta = j.at("eta").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.rho = j.at("rho").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    return c;
}

}  // namespace boolcd
