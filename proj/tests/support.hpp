#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sizekit/netlist.hpp"
#include "sizekit/text.hpp"

namespace sizekit::testing {

inline std::string fixture(const std::string& rel) { return std::string(SIZEKIT_FIXTURES) + "/" + rel; }
inline std::string asset(const std::string& rel) { return std::string(SIZEKIT_ASSETS) + "/" + rel; }

inline Netlist load_netlist(const std::string& path) { return parse_netlist(text::read_file(path)); }
inline Netlist opamp() { return load_netlist(asset("templates/opamp.sp")); }

/// The three circuit templates plus every fixture netlist.
inline std::vector<std::string> netlist_corpus() {
  std::vector<std::string> out = {asset("templates/opamp.sp"), asset("templates/bgr.sp"), asset("templates/ldo.sp")};
  std::vector<std::string> extra;
  for (const auto& e : std::filesystem::directory_iterator(fixture("netlists"))) {
    if (e.path().extension() == ".sp") extra.push_back(e.path().string());
  }
  std::sort(extra.begin(), extra.end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sizekit-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace sizekit::testing
