#include "boolcd/weights.hpp"

#include <stdexcept>

#include "boolcd/rng.hpp"

namespace boolcd {

BooleanWeights::BooleanWeights(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw std::invalid_argument("weight vector must be nonempty");
    for (auto b : bits_)
        if (b > 1) throw std::invalid_argument("boolean weights must be 0 or 1");
}

BooleanWeights BooleanWeights::zeros(int n) {
    return BooleanWeights(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
}

BooleanWeights BooleanWeights::ones(int n) {
    return BooleanWeights(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1));
}

BooleanWeights BooleanWeights::random(int n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x77656967687473ULL));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = rng.uniform01() < 0.5 ? 0 : 1;
    return BooleanWeights(std::move(bits));
}

Eigen::VectorXd BooleanWeights::to_real() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = bits_[static_cast<std::size_t>(i)];
    return v;
}

SpinVector::SpinVector(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    if (spins_.empty()) throw std::invalid_argument("spin vector must be nonempty");
    for (auto s : spins_)
        if (s != -1 && s != 1) throw std::invalid_argument("spins must be -1 or +1");
}

Eigen::VectorXd SpinVector::to_real() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = spins_[static_cast<std::size_t>(i)];
    return v;
}

SpinVector spin_of(const BooleanWeights& w) {
    std::vector<std::int8_t> spins(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i)
        spins[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(2 * w.bit(i) - 1);
    return SpinVector(std::move(spins));
}

BooleanWeights bool_of(const SpinVector& x) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(x.size()));
    for (int i = 0; i < x.size(); ++i)
        bits[static_cast<std::size_t>(i)] = x.spin(i) > 0 ? 1 : 0;
    return BooleanWeights(std::move(bits));
}

}  // namespace boolcd
