#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "boolcd/descent.hpp"
#include "boolcd/fits.hpp"
#include "boolcd/reservoir.hpp"

namespace boolcd {

/// Task template instantiated per sweep size.
struct TaskSpec {
    std::string kind = "mackey_glass";  // mackey_glass | synthetic
    int t_train = 1000;
    int t_test = 200;
    int washout = 100;
    int mg_tau = 17;
    double mg_dt = 0.1;
    double synthetic_noise = 0.05;
    double target_offset = 3.0;
    ReservoirConfig reservoir;  // n_nodes and seed filled in per size
};

struct SweepConfig {
    std::vector<int> sizes{64, 128, 256, 512, 961};
    int minimizers_per_size = 8;
    std::vector<PolicyKind> policies{PolicyKind::greedy, PolicyKind::markovian};
    TaskSpec task;
    double epsilon = 0.35;  // K is measured at fixed accuracy; the MG-task baseline is ~10
    std::uint64_t seed_base = 1;
    int max_epochs_factor = 30;  // max_epochs = factor * N
    int threads = 0;             // 0 = hardware concurrency

    void validate() const;
};

/// Objective (and optional held-out set) for one sweep size; also used by the
/// train command so both share one task construction path.
struct BuiltProblem {
    Objective objective;
    std::optional<TestSet> test;
};
BuiltProblem build_problem(const SweepConfig& cfg, int size);

struct SweepCell {
    int size = 0;
    PolicyKind policy = PolicyKind::markovian;
    EnsembleResult ensemble;
    std::vector<double> final_test_errors;  // parallel to ensemble.traces (may be empty)
    bool failed = false;
    std::string error;
};

struct SweepReport {
    SweepConfig config;
    std::vector<SweepCell> cells;
    std::map<std::string, FitResult> scaling_fits;      // per policy: K_mean vs N
    std::map<std::string, FitResult> convergence_fits;  // per "size_policy": mean curve
};

SweepReport run_sweep(const SweepConfig& cfg);

/// sweep.csv, curves/<size>_<policy>.csv and fits.json under out_dir.
void write_sweep_outputs(const SweepReport& report, const std::string& out_dir);

}  // namespace boolcd
