#pragma once

// Small string helpers shared by the line-oriented parsers.

#include <string>
#include <string_view>
#include <vector>

namespace sizekit::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool iequals(std::string_view a, std::string_view b);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lines of `source` with '\r' stripped; a trailing newline does not produce an empty last line.
std::vector<std::string> lines(std::string_view source);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace sizekit::text
