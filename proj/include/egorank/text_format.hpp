#pragma once

#include <string>
#include <string_view>

namespace egorank {

/// Escapes a string for embedding in a JSON (or DOT) double-quoted literal.
std::string json_escape(std::string_view s);

/// Fixed-point rendering with the given number of decimal places.
std::string fixed(double value, int places);

/// Scientific rendering, 6 significant decimals ("4.440892e-16").
std::string scientific(double value);

} // namespace egorank
