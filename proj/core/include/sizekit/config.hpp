#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sizekit::config {

/// INI-style layered configuration.
///
///   # comment            ; comment
///   [section]
///   key = value
///   include = other.ini  (top level only; loaded first, then overridden by this file)
///
/// Path values are resolved against the directory of the file that set them.
class Config {
 public:
  static Config parse(std::string_view source, const std::string& base_dir = ".");
  static Config load(const std::string& path);

  /// Entries of `other` win.
  void merge(const Config& other);
  /// `section.key = value`, as given by a command-line override.
  void set_override(std::string_view assignment);
  void set(const std::string& section, const std::string& key, const std::string& value,
           const std::string& base_dir = ".");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  /// Throws ConfigError naming section.key when missing.
  std::string require(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& section, const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Path resolved against the defining file's directory; nullopt when unset.
  std::optional<std::string> path(const std::string& section, const std::string& key) const;
  /// Keys of a section in sorted order.
  std::vector<std::string> keys(const std::string& section) const;
  std::vector<std::string> sections() const;
  /// Canonical text with resolved paths for path-like keys left as written.
  std::string to_text() const;

 private:
  struct Entry {
    std::string value;
    std::string base_dir;
  };
  std::map<std::string, std::map<std::string, Entry>> data_;
};

/// Parses "1-10", "1,2,5" or "3" into a seed list.
std::vector<std::uint64_t> parse_seed_list(std::string_view s);

}  // namespace sizekit::config
