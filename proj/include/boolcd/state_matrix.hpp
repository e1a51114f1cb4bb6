#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace boolcd {

/// T x N matrix of nonnegative node intensities, one row per time step.
/// Immutable after construction; construction validates that every entry is
/// finite and >= 0 and that no column is identically zero.
class StateMatrix {
public:
    explicit StateMatrix(Eigen::MatrixXd values);

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::Index horizon() const { return values_.rows(); }
    Eigen::Index nodes() const { return values_.cols(); }

    /// CSV: one row per time step, comma-separated decimal entries.
    void save_csv(const std::string& path, bool header = true) const;
    static StateMatrix load_csv(const std::string& path);

    /// Binary: magic "BCD1", little-endian u32 T, u32 N, then T*N doubles row-major.
    void save_binary(const std::string& path) const;
    static StateMatrix load_binary(const std::string& path);

private:
    Eigen::MatrixXd values_;
};

}  // namespace boolcd
