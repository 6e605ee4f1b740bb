#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sizekit {

enum class DeviceKind { nmos, pmos, resistor, capacitor, current_source, voltage_source, subcircuit };

std::string_view to_string(DeviceKind kind);
DeviceKind device_kind_from_string(std::string_view name);
inline bool is_mos(DeviceKind k) { return k == DeviceKind::nmos || k == DeviceKind::pmos; }

/// One card of the netlist. MOS terminal order is drain, gate, source, bulk.
struct Device {
  std::string name;
  DeviceKind kind = DeviceKind::resistor;
  std::vector<std::string> terminals;
  /// MOS model name or subcircuit name; empty for passives and sources.
  std::string model;
  /// Upper-case parameter name -> SI value. Passives keep their value under "R"/"C",
  /// sources under "DC" (and "AC").
  std::map<std::string, double> params;

  const std::string& drain() const { return terminals.at(0); }
  const std::string& gate() const { return terminals.at(1); }
  const std::string& source() const { return terminals.at(2); }

  bool operator==(const Device&) const = default;
};

/// (device, parameter) pair naming one sizable quantity. Ordered by device then parameter.
struct Handle {
  std::string device;
  std::string param;

  auto operator<=>(const Handle&) const = default;
  bool operator==(const Handle&) const = default;

  /// "W(M1)"
  std::string str() const { return param + "(" + device + ")"; }
};

/// Immutable device graph. Construct through `Netlist::make` or `parse_netlist`.
class Netlist {
 public:
  Netlist() : nets_{"0"}, ground_("0") {}

  /// Validates the invariants (unique names, terminal counts, positive parameters)
  /// and derives the net set and ground. Throws ParseError (line 0) on violation.
  static Netlist make(std::string title, std::vector<Device> devices,
                      std::vector<std::string> cards = {});

  const std::string& title() const { return title_; }
  const std::vector<Device>& devices() const { return devices_; }
  const std::set<std::string>& nets() const { return nets_; }
  const std::string& ground() const { return ground_; }
  /// Cards kept verbatim (.model, .option, .subckt blocks, ...), in source order.
  const std::vector<std::string>& cards() const { return cards_; }

  const Device* find(std::string_view name) const;

  /// Structural equality: device order is irrelevant.
  friend bool operator==(const Netlist& a, const Netlist& b);

 private:
  std::string title_;
  std::vector<Device> devices_;
  std::set<std::string> nets_;
  std::string ground_;
  std::vector<std::string> cards_;
};

/// Parses the supported SPICE subset (M R C I V X cards, '+' continuations,
/// '*' and '$' comments, verbatim dot cards and .subckt blocks).
/// A leading '*' line is taken as the title. Throws ParseError with the line number.
Netlist parse_netlist(std::string_view source);

/// Canonical text: title comment, devices sorted by name, verbatim cards, ".end".
std::string emit_netlist(const Netlist& netlist);

/// Line-oriented key: value dump of the device graph.
std::string dump_netlist(const Netlist& netlist);

/// Whether `param` is an optimizable parameter for a device of `kind`.
bool is_sizable(DeviceKind kind, std::string_view param);

/// Integer-valued parameters (MOS multiplier) are relaxed during optimization
/// and rounded when expanded.
bool is_integer_param(std::string_view param);

/// Optimizable (device, param) pairs sorted by device name then parameter name:
/// W, L, M for MOS; R; C; DC for current sources.
std::vector<Handle> sizable_parameters(const Netlist& netlist);

}  // namespace sizekit
