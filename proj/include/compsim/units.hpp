#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace compsim {

/// Parses a SPICE-style number with an optional engineering suffix
/// (f, p, n, u, m, k, meg, g, t; case-insensitive). Alphabetic unit text
/// after the suffix is ignored, so "1fF" and "10ps" are accepted.
std::optional<double> parse_eng(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

}  // namespace compsim
