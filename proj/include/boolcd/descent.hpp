#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boolcd/objective.hpp"
#include "boolcd/rng.hpp"
#include "boolcd/weights.hpp"

namespace boolcd {

enum class PolicyKind { markovian, greedy };

PolicyKind policy_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

struct SelectorPolicy {
    PolicyKind kind = PolicyKind::markovian;
    std::uint64_t rng_seed = 0;
    /// Greedy initial bias W^bias at k=1; drawn uniform(0,1) when unset.
    std::optional<Eigen::VectorXd> initial_bias;
};

/// Mutable selection state for one descent run. Markovian draws uniformly;
/// greedy draws l = argmax_i u_i * bias_i with u iid uniform(0,1), then adds
/// 1/N to every bias and zeroes the selected one. Argmax ties resolve to the
/// lowest index.
class CoordinateSelector {
public:
    CoordinateSelector(const SelectorPolicy& policy, int n);

    int select();

    PolicyKind kind() const { return kind_; }
    /// Greedy bias vector; throws if the policy is markovian.
    const Eigen::VectorXd& bias() const;

private:
    PolicyKind kind_;
    int n_;
    Rng rng_;
    Eigen::VectorXd bias_;
};

struct DescentConfig {
    SelectorPolicy policy;
    int max_epochs = 4000;
    double target_error = 0.0;  // epsilon on the reported mean-square error
    bool stop_on_local_min = true;
    bool record_test_error = false;
};

enum class StopReason { local_min, epsilon, max_epochs };
std::string to_string(StopReason reason);

struct EpochRecord {
    int epoch = 0;
    int flipped_index = -1;  // -1 on the initial row
    double error = 0.0;      // mse of the kept configuration
    int reward = 0;
    double test_error = std::numeric_limits<double>::quiet_NaN();
};

struct DescentTrace {
    std::vector<EpochRecord> records;  // records[0] is the initial state (epoch 0)
    BooleanWeights final_weights{std::vector<std::uint8_t>{0}};
    int epochs_to_converge = 0;  // K: epoch of the last accepted flip
    int total_epochs = 0;
    StopReason converged_reason = StopReason::max_epochs;

    double final_error() const { return records.back().error; }
};

/// Optional held-out segment whose error is tracked alongside training.
struct TestSet {
    StateMatrix state;
    Eigen::VectorXd target;
};

/// Single accept/reject mutation step: flip bit l, keep the flip only if the
/// error strictly decreased. The returned error is that of the kept
/// configuration. The residual is maintained by a rank-1 column update.
struct StepResult {
    BooleanWeights weights;
    int reward = 0;
    double error = 0.0;
};
StepResult step(const Objective& obj, const BooleanWeights& w, int l);

DescentTrace run_descent(const Objective& obj, const BooleanWeights& w0, const DescentConfig& cfg,
                         const TestSet* test = nullptr);

struct EnsembleResult {
    std::vector<DescentTrace> traces;
    std::vector<double> mean_error;  // indexed by epoch, stopped traces padded
    std::vector<double> std_error;   // with their final error
    double k_mean = 0.0;
    double k_std = 0.0;
    std::map<std::string, int> reason_counts;
};

/// Runs n_minimizers descents from the shared start w0, one RNG stream per
/// trace. seeds may be empty (derived from cfg.policy.rng_seed) or must have
/// exactly n_minimizers entries. Results do not depend on `threads`.
EnsembleResult run_ensemble(const Objective& obj, const BooleanWeights& w0,
                            const DescentConfig& cfg, int n_minimizers,
                            std::vector<std::uint64_t> seeds = {}, const TestSet* test = nullptr,
                            int threads = 0);

/// CSV with header epoch,flipped_index,error,reward,test_error.
void trace_to_csv(const DescentTrace& trace, std::ostream& out);
/// Summary JSON: mean_error[], std_error[], K_mean, K_std, converged_reason histogram.
std::string ensemble_summary_json(const EnsembleResult& ensemble);

}  // namespace boolcd
