#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace graphblow {

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
/// Locale-independent.
std::string format_double(double value);

/// Strict parse of a complete token; throws ValidationError with `what` in
/// the message on failure.
double parse_double(std::string_view token, std::string_view what);
std::int64_t parse_int(std::string_view token, std::string_view what);
std::size_t parse_size(std::string_view token, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace graphblow
