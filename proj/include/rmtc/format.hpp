#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace rmtc::detail {

// Shortest round-trip decimal form; the one number format used in every
// file this library writes.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace rmtc::detail
