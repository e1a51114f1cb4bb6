#pragma once

#include <charconv>
#include <string>

namespace boolcd {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form of a double; locale-independent and
/// byte-stable across reruns.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace boolcd
