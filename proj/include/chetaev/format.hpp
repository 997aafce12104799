#pragma once

#include <string>
#include <string_view>

namespace chetaev {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full decimal literal; throws MalformedInputError otherwise.
double parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace chetaev
