#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace boolcd {

class SpinVector;

/// Readout weight vector over {0,1}.
class BooleanWeights {
public:
    explicit BooleanWeights(std::vector<std::uint8_t> bits);
    static BooleanWeights zeros(int n);
    static BooleanWeights ones(int n);
    static BooleanWeights random(int n, std::uint64_t seed);

    int size() const { return static_cast<int>(bits_.size()); }
    std::uint8_t bit(int i) const { return bits_[static_cast<std::size_t>(i)]; }
    void flip(int i) { bits_[static_cast<std::size_t>(i)] ^= 1; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    Eigen::VectorXd to_real() const;

    bool operator==(const BooleanWeights&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Spin image x = 2W - 1 of a Boolean weight vector, entries in {-1,+1}.
class SpinVector {
public:
    explicit SpinVector(std::vector<std::int8_t> spins);

    int size() const { return static_cast<int>(spins_.size()); }
    std::int8_t spin(int i) const { return spins_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int8_t>& spins() const { return spins_; }

    Eigen::VectorXd to_real() const;

    bool operator==(const SpinVector&) const = default;

private:
    std::vector<std::int8_t> spins_;
};

SpinVector spin_of(const BooleanWeights& w);
BooleanWeights bool_of(const SpinVector& x);

}  // namespace boolcd
