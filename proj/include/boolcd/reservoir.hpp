#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>

#include "boolcd/state_matrix.hpp"

namespace boolcd {

/// Leaky-tanh echo state network parameters. Node states are squared
/// elementwise on readout, so the recorded matrix holds intensities.
struct ReservoirConfig {
    int n_nodes = 100;
    double spectral_radius = 0.9;
    double leak_rate = 0.3;
    double input_scale = 1.0;
    double connectivity = 0.1;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument on a bad field
};

/// Fixed internal weights materialized from a config. Exposed so that an
/// external scalar re-simulation can reproduce drive_reservoir exactly.
struct ReservoirWeights {
    Eigen::MatrixXd recurrent;  // n x n, rescaled to the requested spectral radius
    Eigen::VectorXd input;      // n, uniform(-1,1) * input_scale
    double radius_estimate = 0.0;
};

ReservoirWeights build_reservoir_weights(const ReservoirConfig& cfg);

/// Runs the network over `input`, discards the first `washout` steps and
/// returns the squared states of the remaining T = input.size() - washout
/// steps as a T x N matrix. Deterministic given (cfg, input).
StateMatrix drive_reservoir(const ReservoirConfig& cfg, std::span<const double> input,
                            int washout = 100);

enum class EntryDistribution { uniform01, abs_gaussian, squared_gaussian };

EntryDistribution entry_distribution_from_string(const std::string& name);
std::string to_string(EntryDistribution d);

/// Per-entry variance of the named distribution (for spectral-scaling checks).
double entry_variance(EntryDistribution d);

/// T x N matrix with i.i.d. entries from a nonnegative distribution.
StateMatrix random_state_matrix(int n, int t, EntryDistribution distribution, std::uint64_t seed);

}  // namespace boolcd
