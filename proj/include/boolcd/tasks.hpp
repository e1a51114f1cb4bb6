#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolcd/reservoir.hpp"
#include "boolcd/state_matrix.hpp"
#include "boolcd/weights.hpp"

namespace boolcd {

/// Mackey-Glass series integrated with RK4 (beta=0.2, gamma=0.1, n=10), the
/// delayed term held fixed over a step. The initial history is a seeded
/// perturbation of 1.2; a transient prefix is discarded and the returned
/// series is standardized to zero mean, unit variance.
std::vector<double> mackey_glass(int length, int tau = 17, double dt = 0.1,
                                 std::uint64_t seed = 0);

/// target = E * planted_w + gaussian(0, noise_std); at noise 0 the planted
/// weights attain mse 0.
Eigen::VectorXd synthetic_target(const StateMatrix& state, const BooleanWeights& planted_w,
                                 double noise_std, std::uint64_t seed);

/// One-step-ahead prediction task: row n of the train states pairs with
/// input[washout + n + 1]. Train and test segments are disjoint in time.
/// `input` is the series plus target_offset; the Boolean readout is a sum of
/// nonnegative intensities, so targets must live in a positive range for the
/// error floor to be small. The offset is applied to the drive and the
/// targets alike, which keeps the one-step shift exact. States are rescaled
/// by a detector gain chosen so that the half-on readout matches the target
/// mean; without it the error of a random start grows with N^2 and drowns
/// the convergence curves.
struct TaskData {
    std::vector<double> input;  // offset series actually driving the reservoir
    StateMatrix state_train;
    Eigen::VectorXd target_train;
    std::optional<StateMatrix> state_test;
    Eigen::VectorXd target_test;
    int washout = 0;
    double target_offset = 0.0;
    double intensity_gain = 1.0;  // detector gain: half-on readout == target mean

    bool has_test() const { return state_test.has_value(); }
};

TaskData make_task(const ReservoirConfig& cfg, std::span<const double> series, int t_train,
                   int t_test, int washout = 100, double target_offset = 3.0);

/// Writes state matrices (csv or binary per `binary`), target vectors and a
/// JSON sidecar (lengths, seeds, shift convention) into `dir`.
void save_task(const TaskData& task, const std::string& dir, bool binary,
               const ReservoirConfig& cfg);

}  // namespace boolcd
