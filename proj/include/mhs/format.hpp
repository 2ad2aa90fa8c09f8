// format.hpp — deterministic number formatting for CSV/JSONL streams.

#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace mhs {

/// Shortest round-trip decimal form (std::to_chars); "inf"/"nan" spelled out.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace mhs
