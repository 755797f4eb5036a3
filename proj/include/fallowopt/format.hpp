#pragma once

#include <charconv>
#include <string>

namespace fallowopt {

/// Shortest decimal text that parses back to exactly `v` ('.' separator,
/// independent of the locale).
inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace fallowopt
