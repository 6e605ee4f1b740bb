#include "sizekit/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace sizekit {

namespace {

struct Scale {
  std::string_view suffix;
  double factor;
};

// "meg" must be tried before "m".
constexpr std::array<Scale, 10> kScales{{
    {"meg", 1e6}, {"mil", 25.4e-6}, {"t", 1e12}, {"g", 1e9}, {"k", 1e3},
    {"m", 1e-3}, {"u", 1e-6}, {"n", 1e-9}, {"p", 1e-12}, {"f", 1e-15},
}};

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

std::optional<double> try_parse_value(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;
  double mantissa = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, mantissa);
  if (ec != std::errc{} || !std::isfinite(mantissa)) return std::nullopt;
  std::string_view rest(ptr, static_cast<std::size_t>(last - ptr));
  double factor = 1.0;
  for (const auto& scale : kScales) {
    if (iequals_prefix(rest, scale.suffix)) {
      factor = scale.factor;
      rest.remove_prefix(scale.suffix.size());
      break;
    }
  }
  for (char c : rest) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return mantissa * factor;
}

double parse_value(std::string_view token) {
  auto v = try_parse_value(token);
  if (!v) throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return *v;
}

std::string format_value(double v) { return fmt::format("{}", v); }

std::string format_eng(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return fmt::format("{}", v);
  static constexpr std::array<std::pair<double, const char*>, 9> kEng{{
      {1e12, "T"}, {1e9, "G"}, {1e6, "meg"}, {1e3, "k"}, {1.0, ""},
      {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"},
  }};
  const double mag = std::fabs(v);
  for (const auto& [factor, suffix] : kEng) {
    if (mag >= factor * (1 - 1e-12)) return fmt::format("{:.{}g}{}", v / factor, digits, suffix);
  }
  return fmt::format("{:.{}g}f", v / 1e-15, digits);
}

}  // namespace sizekit
