#include "sizekit/config.hpp"

#include <cstdint>
#include <filesystem>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::config {

Config Config::parse(std::string_view source, const std::string& base_dir) {
  Config cfg;
  Config included;
  std::string section;
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto l = text::trim(lines[i]);
    if (l.empty() || l.front() == '#' || l.front() == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ParseError(i + 1, "unterminated section header");
      section = text::to_lower(text::trim(l.substr(1, l.size() - 2)));
      if (section.empty()) throw ParseError(i + 1, "empty section name");
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected 'key = value'");
    const auto key = text::to_lower(text::trim(l.substr(0, eq)));
    const auto value = std::string(text::trim(l.substr(eq + 1)));
    if (key.empty()) throw ParseError(i + 1, "empty key");
    if (section.empty() && key == "include") {
      included.merge(load((std::filesystem::path(base_dir) / value).string()));
      continue;
    }
    if (section.empty()) throw ParseError(i + 1, "key '" + key + "' outside any [section]");
    cfg.set(section, key, value, base_dir);
  }
  included.merge(cfg);
  return included;
}

Config Config::load(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path();
  try {
    return parse(text::read_file(path), dir.empty() ? "." : dir.string());
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void Config::merge(const Config& other) {
  for (const auto& [s, entries] : other.data_) {
    for (const auto& [k, e] : entries) data_[s][k] = e;
  }
}

void Config::set_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value, got '" + std::string(assignment) + "'");
  }
  set(text::to_lower(text::trim(assignment.substr(0, dot))), text::to_lower(text::trim(assignment.substr(dot + 1, eq - dot - 1))),
      std::string(text::trim(assignment.substr(eq + 1))), ".");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value,
                 const std::string& base_dir) {
  data_[text::to_lower(section)][text::to_lower(key)] = Entry{value, base_dir};
}

bool Config::has(const std::string& section, const std::string& key) const { return get(section, key).has_value(); }

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second.value;
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::string Config::require(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v || v->empty()) throw ConfigError("missing required setting " + section + "." + key);
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(section + "." + key + ": expected a number, got '" + *v + "'");
  }
}

std::size_t Config::get_size(const std::string& section, const std::string& key, std::size_t fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const auto n = std::stoull(*v, &pos);
    if (pos != v->size() || v->front() == '-') throw std::invalid_argument(*v);
    return static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw ConfigError(section + "." + key + ": expected a non-negative integer, got '" + *v + "'");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  const auto l = text::to_lower(*v);
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  throw ConfigError(section + "." + key + ": expected true/false, got '" + *v + "'");
}

std::optional<std::string> Config::path(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end() || k->second.value.empty()) return std::nullopt;
  const std::filesystem::path p(k->second.value);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(k->second.base_dir) / p).lexically_normal().string();
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = data_.find(section);
  if (s == data_.end()) return out;
  for (const auto& [k, e] : s->second) out.push_back(k);
  return out;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [s, e] : data_) out.push_back(s);
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [s, entries] : data_) {
    out += "[" + s + "]\n";
    for (const auto& [k, e] : entries) out += k + " = " + e.value + "\n";
    out += "\n";
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  try {
    for (const auto& part : text::split(s, ',')) {
      const auto p = text::trim(part);
      if (p.empty()) continue;
      const auto dash = p.find('-');
      if (dash != std::string_view::npos && dash > 0) {
        const auto lo = std::stoull(std::string(p.substr(0, dash)));
        const auto hi = std::stoull(std::string(p.substr(dash + 1)));
        if (hi < lo) throw ConfigError("seed range " + std::string(p) + " is descending");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoull(std::string(p)));
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad seed list '" + std::string(s) + "'");
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

}  // namespace sizekit::config
