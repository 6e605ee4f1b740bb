#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sizekit {

/// Parses a SPICE number: mantissa with optional scale suffix
/// (f p n u m k meg g t, case-insensitive) followed by ignored unit letters,
/// e.g. "2u", "0.18u", "10k", "1meg", "3.3e4", "10pF".
std::optional<double> try_parse_value(std::string_view token);

/// Same as try_parse_value but throws std::invalid_argument.
double parse_value(std::string_view token);

/// Shortest text that parses back to exactly `v`.
std::string format_value(double v);

/// Human-readable engineering notation ("2u", "10k"); lossy, for reports only.
std::string format_eng(double v, int digits = 4);

}  // namespace sizekit
