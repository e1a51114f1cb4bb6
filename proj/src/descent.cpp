#include "boolcd/descent.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "boolcd/format.hpp"

namespace boolcd {

PolicyKind policy_from_string(const std::string& name) {
    if (name == "markovian") return PolicyKind::markovian;
    if (name == "greedy") return PolicyKind::greedy;
    throw std::invalid_argument("unknown policy: " + name + " (expected markovian|greedy)");
}

std::string to_string(PolicyKind kind) {
    return kind == PolicyKind::markovian ? "markovian" : "greedy";
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::local_min: return "local_min";
        case StopReason::epsilon: return "epsilon";
        case StopReason::max_epochs: return "max_epochs";
    }
    throw std::logic_error("unreachable");
}

CoordinateSelector::CoordinateSelector(const SelectorPolicy& policy, int n)
    : kind_(policy.kind), n_(n), rng_(derive_seed(policy.rng_seed, 0x73656c656374ULL)) {
    if (n < 1) throw std::invalid_argument("selector dimension must be >= 1");
    if (kind_ == PolicyKind::greedy) {
        if (policy.initial_bias) {
            if (policy.initial_bias->size() != n)
                throw std::invalid_argument("initial bias length does not match dimension");
            if ((policy.initial_bias->array() < 0.0).any())
                throw std::invalid_argument("bias entries must be nonnegative");
            bias_ = *policy.initial_bias;
        } else {
            bias_ = Eigen::VectorXd(n);
            for (int i = 0; i < n; ++i) bias_[i] = rng_.uniform01();  // random init at k=1
        }
    }
}

const Eigen::VectorXd& CoordinateSelector::bias() const {
    if (kind_ != PolicyKind::greedy)
        throw std::logic_error("bias vector exists only for the greedy policy");
    return bias_;
}

int CoordinateSelector::select() {
    if (kind_ == PolicyKind::markovian) return rng_.uniform_index(n_);
    if (bias_.size() != n_) throw std::logic_error("greedy selector bias not initialized");
    int best = 0;
    double best_score = -1.0;
    for (int i = 0; i < n_; ++i) {
        const double score = rng_.uniform01() * bias_[i];
        if (score > best_score) {  // strict: ties keep the lowest index
            best_score = score;
            best = i;
        }
    }
    bias_.array() += 1.0 / static_cast<double>(n_);
    bias_[best] = 0.0;
    return best;
}

namespace {

/// Residual-tracking state for one descent: keeps r = target - E w so a flip
/// costs O(T) instead of O(T N).
class ResidualTracker {
public:
    ResidualTracker(const StateMatrix& state, const Eigen::VectorXd& target,
                    const BooleanWeights& w)
        : state_(state), residual_(target - state.values() * w.to_real()) {}

    double error() const {
        return residual_.squaredNorm() / static_cast<double>(state_.horizon());
    }

    /// Error if bit l changed from `bit` to 1-`bit`, without committing.
    double flipped_error(int l, std::uint8_t bit) const {
        const auto col = state_.values().col(l);
        // bit 0 -> 1 adds the column to the readout, removing it from the residual
        const double sign = bit == 0 ? -1.0 : 1.0;
        return (residual_ + sign * col).squaredNorm() / static_cast<double>(state_.horizon());
    }

    void commit(int l, std::uint8_t old_bit) {
        const double sign = old_bit == 0 ? -1.0 : 1.0;
        residual_ += sign * state_.values().col(l);
    }

private:
    const StateMatrix& state_;
    Eigen::VectorXd residual_;
};

}  // namespace

StepResult step(const Objective& obj, const BooleanWeights& w, int l) {
    if (l < 0 || l >= w.size()) throw std::invalid_argument("step: coordinate out of range");
    ResidualTracker tracker(obj.state(), obj.target(), w);
    const double before = tracker.error();
    const double after = tracker.flipped_error(l, w.bit(l));
    if (after < before) {
        BooleanWeights next = w;
        next.flip(l);
        return StepResult{std::move(next), 1, after};
    }
    return StepResult{w, 0, before};
}

DescentTrace run_descent(const Objective& obj, const BooleanWeights& w0, const DescentConfig& cfg,
                         const TestSet* test) {
    if (w0.size() != obj.n()) throw std::invalid_argument("run_descent: dimension mismatch");
    if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (cfg.target_error < 0.0) throw std::invalid_argument("target_error must be >= 0");
    if (test && test->state.nodes() != obj.n())
        throw std::invalid_argument("test set node count does not match objective");

    const int n = obj.n();
    CoordinateSelector selector(cfg.policy, n);
    BooleanWeights w = w0;
    ResidualTracker train(obj.state(), obj.target(), w);
    std::optional<ResidualTracker> test_tracker;
    if (test && cfg.record_test_error) test_tracker.emplace(test->state, test->target, w);

    DescentTrace trace;
    trace.records.reserve(static_cast<std::size_t>(cfg.max_epochs) + 1);
    double error = train.error();
    const auto test_error = [&]() {
        return test_tracker ? test_tracker->error() : std::numeric_limits<double>::quiet_NaN();
    };
    trace.records.push_back(EpochRecord{0, -1, error, 0, test_error()});
    trace.epochs_to_converge = 0;

    // coordinates rejected since the last accepted flip; covering all N of
    // them certifies a local coordinatewise minimizer exactly
    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(n), 0);
    int rejected_count = 0;

    auto finish = [&](StopReason reason, int epoch) {
        trace.final_weights = w;
        trace.total_epochs = epoch;
        trace.converged_reason = reason;
        return trace;
    };

    if (error <= cfg.target_error) return finish(StopReason::epsilon, 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const int l = selector.select();
        const double candidate = train.flipped_error(l, w.bit(l));
        int reward = 0;
        if (candidate < error) {
            reward = 1;
            train.commit(l, w.bit(l));
            if (test_tracker) test_tracker->commit(l, w.bit(l));
            w.flip(l);
            error = candidate;
            trace.epochs_to_converge = epoch;
            std::fill(rejected.begin(), rejected.end(), 0);
            rejected_count = 0;
        } else if (!rejected[static_cast<std::size_t>(l)]) {
            rejected[static_cast<std::size_t>(l)] = 1;
            ++rejected_count;
        }
        trace.records.push_back(EpochRecord{epoch, l, error, reward, test_error()});

        if (error <= cfg.target_error) return finish(StopReason::epsilon, epoch);
        if (cfg.stop_on_local_min && rejected_count == n)
            return finish(StopReason::local_min, epoch);
    }
    return finish(StopReason::max_epochs, cfg.max_epochs);
}

EnsembleResult run_ensemble(const Objective& obj, const BooleanWeights& w0,
                            const DescentConfig& cfg, int n_minimizers,
                            std::vector<std::uint64_t> seeds, const TestSet* test, int threads) {
    if (n_minimizers < 1) throw std::invalid_argument("n_minimizers must be >= 1");
    if (seeds.empty()) {
        seeds.reserve(static_cast<std::size_t>(n_minimizers));
        for (int i = 0; i < n_minimizers; ++i)
            seeds.push_back(derive_seed(cfg.policy.rng_seed, 0x656e73656d626cULL,
                                        static_cast<std::uint64_t>(i)));
    }
    if (static_cast<int>(seeds.size()) != n_minimizers)
        throw std::invalid_argument("seed list length must equal n_minimizers");

    EnsembleResult result;
    result.traces.resize(static_cast<std::size_t>(n_minimizers),
                         DescentTrace{});
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int pool = threads > 0 ? threads : static_cast<int>(hw);

    auto run_one = [&](int i) {
        DescentConfig local = cfg;
        local.policy.rng_seed = seeds[static_cast<std::size_t>(i)];
        return run_descent(obj, w0, local, test);
    };
    for (int base = 0; base < n_minimizers; base += pool) {
        const int count = std::min(pool, n_minimizers - base);
        std::vector<std::future<DescentTrace>> futures;
        futures.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            futures.push_back(std::async(std::launch::async, run_one, base + i));
        for (int i = 0; i < count; ++i)
            result.traces[static_cast<std::size_t>(base + i)] = futures[static_cast<std::size_t>(i)].get();
    }

    std::size_t max_len = 0;
    for (const auto& t : result.traces) max_len = std::max(max_len, t.records.size());
    result.mean_error.assign(max_len, 0.0);
    result.std_error.assign(max_len, 0.0);
    for (std::size_t k = 0; k < max_len; ++k) {
        double sum = 0.0, sq = 0.0;
        for (const auto& t : result.traces) {
            const double v =
                k < t.records.size() ? t.records[k].error : t.records.back().error;
            sum += v;
            sq += v * v;
        }
        const double mean = sum / static_cast<double>(n_minimizers);
        result.mean_error[k] = mean;
        result.std_error[k] =
            std::sqrt(std::max(0.0, sq / static_cast<double>(n_minimizers) - mean * mean));
    }

    double k_sum = 0.0, k_sq = 0.0;
    for (const auto& t : result.traces) {
        const double k = t.epochs_to_converge;
        k_sum += k;
        k_sq += k * k;
        ++result.reason_counts[to_string(t.converged_reason)];
    }
    result.k_mean = k_sum / static_cast<double>(n_minimizers);
    result.k_std =
        std::sqrt(std::max(0.0, k_sq / static_cast<double>(n_minimizers) - result.k_mean * result.k_mean));
    return result;
}

void trace_to_csv(const DescentTrace& trace, std::ostream& out) {
    out << "epoch,flipped_index,error,reward,test_error\n";
    for (const auto& rec : trace.records) {
        out << rec.epoch << ',' << rec.flipped_index << ',' << format_double(rec.error) << ','
            << rec.reward << ',';
        if (!std::isnan(rec.test_error)) out << format_double(rec.test_error);
        out << '\n';
    }
}

std::string ensemble_summary_json(const EnsembleResult& ensemble) {
    nlohmann::json j;
    j["mean_error"] = ensemble.mean_error;
    j["std_error"] = ensemble.std_error;
    j["K_mean"] = ensemble.k_mean;
    j["K_std"] = ensemble.k_std;
    j["converged_reason"] = ensemble.reason_counts;
    j["n_traces"] = ensemble.traces.size();
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& t : ensemble.traces) ks.push_back(t.epochs_to_converge);
    j["K"] = ks;
    return j.dump(2);
}

}  // namespace boolcd
