#include "sizekit/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <unordered_map>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

namespace sizekit {

std::string_view to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::nmos: return "nmos";
    case DeviceKind::pmos: return "pmos";
    case DeviceKind::resistor: return "resistor";
    case DeviceKind::capacitor: return "capacitor";
    case DeviceKind::current_source: return "current-source";
    case DeviceKind::voltage_source: return "voltage-source";
    case DeviceKind::subcircuit: return "subcircuit-instance";
  }
  return "?";
}

DeviceKind device_kind_from_string(std::string_view name) {
  for (auto k : {DeviceKind::nmos, DeviceKind::pmos, DeviceKind::resistor, DeviceKind::capacitor,
                 DeviceKind::current_source, DeviceKind::voltage_source, DeviceKind::subcircuit}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown device kind '" + std::string(name) + "'");
}

namespace {

std::size_t required_terminals(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::nmos:
    case DeviceKind::pmos: return 4;
    case DeviceKind::subcircuit: return 1;
    default: return 2;
  }
}

void check_device(const Device& d, std::size_t line) {
  if (d.name.empty()) throw ParseError(line, "device without a name");
  if (d.terminals.size() < required_terminals(d.kind)) {
    throw ParseError(line, fmt::format("dangling terminal: {} '{}' needs {} terminals, got {}",
                                       to_string(d.kind), d.name, required_terminals(d.kind),
                                       d.terminals.size()));
  }
  if (is_mos(d.kind) && d.terminals.size() != 4) {
    throw ParseError(line, "MOS device '" + d.name + "' must have exactly 4 terminals");
  }
  for (const auto& t : d.terminals) {
    if (t.empty()) throw ParseError(line, "dangling terminal on '" + d.name + "'");
  }
  for (const auto& [key, value] : d.params) {
    if (!std::isfinite(value)) throw ParseError(line, "non-finite parameter " + key + " on " + d.name);
    if (d.kind != DeviceKind::voltage_source && !(value > 0.0)) {
      throw ParseError(line, fmt::format("non-positive parameter {}={} on '{}'", key,
                                         format_value(value), d.name));
    }
  }
}

std::string infer_ground(const std::set<std::string>& nets) {
  for (const char* candidate : {"0", "gnd", "GND", "vss", "VSS"}) {
    if (nets.count(candidate)) return candidate;
  }
  return "0";
}

}  // namespace

Netlist Netlist::make(std::string title, std::vector<Device> devices, std::vector<std::string> cards) {
  Netlist n;
  n.title_ = std::move(title);
  n.cards_ = std::move(cards);
  n.nets_.clear();
  std::set<std::string> names;
  for (const auto& d : devices) {
    check_device(d, 0);
    if (!names.insert(d.name).second) throw ParseError(0, "duplicate device name '" + d.name + "'");
    n.nets_.insert(d.terminals.begin(), d.terminals.end());
  }
  n.ground_ = infer_ground(n.nets_);
  n.nets_.insert(n.ground_);
  n.devices_ = std::move(devices);
  return n;
}

const Device* Netlist::find(std::string_view name) const {
  for (const auto& d : devices_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

bool operator==(const Netlist& a, const Netlist& b) {
  if (a.title_ != b.title_ || a.ground_ != b.ground_ || a.nets_ != b.nets_ || a.cards_ != b.cards_ ||
      a.devices_.size() != b.devices_.size()) {
    return false;
  }
  auto sorted = [](const std::vector<Device>& v) {
    std::vector<const Device*> out;
    for (const auto& d : v) out.push_back(&d);
    std::sort(out.begin(), out.end(), [](auto* x, auto* y) { return x->name < y->name; });
    return out;
  };
  auto sa = sorted(a.devices_);
  auto sb = sorted(b.devices_);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (!(*sa[i] == *sb[i])) return false;
  }
  return true;
}

namespace {

struct LogicalLine {
  std::size_t line;
  std::string text;
};

std::string strip_inline_comment(std::string_view s) {
  auto pos = s.find('$');
  if (pos != std::string_view::npos) s = s.substr(0, pos);
  return std::string(text::trim(s));
}

// "W = 2u" -> "W=2u" so parameters tokenize as one word.
std::string tighten_equals(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '=') {
      while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
      out += '=';
      while (i + 1 < s.size() && std::isspace(static_cast<unsigned char>(s[i + 1]))) ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

double parse_param_value(const std::string& token, std::size_t line, const std::string& what) {
  auto v = try_parse_value(token);
  if (!v) throw ParseError(line, "bad value '" + token + "' for " + what);
  return *v;
}

void split_key_values(const std::vector<std::string>& tokens, std::size_t from,
                      std::vector<std::string>& positional, std::map<std::string, double>& params,
                      std::size_t line, const std::string& device) {
  for (std::size_t i = from; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string::npos) {
      if (!params.empty()) {
        throw ParseError(line, "positional token '" + tokens[i] + "' after parameters on " + device);
      }
      positional.push_back(tokens[i]);
      continue;
    }
    std::string key = text::to_upper(tokens[i].substr(0, eq));
    std::string value = tokens[i].substr(eq + 1);
    if (key.empty() || value.empty()) throw ParseError(line, "malformed parameter '" + tokens[i] + "'");
    if (params.count(key)) throw ParseError(line, "parameter " + key + " given twice on " + device);
    params[key] = parse_param_value(value, line, key + " of " + device);
  }
}

Device parse_device(const LogicalLine& ll) {
  auto tokens = text::split_ws(tighten_equals(ll.text));
  Device d;
  d.name = tokens[0];
  const char lead = static_cast<char>(std::toupper(static_cast<unsigned char>(d.name[0])));
  std::vector<std::string> pos;
  split_key_values(tokens, 1, pos, d.params, ll.line, d.name);

  switch (lead) {
    case 'M': {
      if (pos.size() < 5) {
        throw ParseError(ll.line, fmt::format("dangling terminal: MOS '{}' needs 4 nets and a model",
                                              d.name));
      }
      if (pos.size() > 5) throw ParseError(ll.line, "too many positional fields on '" + d.name + "'");
      d.terminals.assign(pos.begin(), pos.begin() + 4);
      d.model = pos[4];
      d.kind = DeviceKind::nmos;  // polarity resolved once .model cards are known
      break;
    }
    case 'R':
    case 'C': {
      d.kind = lead == 'R' ? DeviceKind::resistor : DeviceKind::capacitor;
      const std::string key(1, lead);
      if (pos.size() < 2) throw ParseError(ll.line, "dangling terminal: '" + d.name + "' needs 2 nets");
      d.terminals.assign(pos.begin(), pos.begin() + 2);
      if (pos.size() == 3) {
        if (d.params.count(key)) throw ParseError(ll.line, key + " given twice on " + d.name);
        d.params[key] = parse_param_value(pos[2], ll.line, key + " of " + d.name);
      } else if (pos.size() > 3) {
        throw ParseError(ll.line, "too many positional fields on '" + d.name + "'");
      }
      if (!d.params.count(key)) throw ParseError(ll.line, "missing value on '" + d.name + "'");
      break;
    }
    case 'I':
    case 'V': {
      d.kind = lead == 'I' ? DeviceKind::current_source : DeviceKind::voltage_source;
      if (pos.size() < 2) throw ParseError(ll.line, "dangling terminal: '" + d.name + "' needs 2 nets");
      d.terminals.assign(pos.begin(), pos.begin() + 2);
      std::size_t i = 2;
      while (i < pos.size()) {
        std::string key = "DC";
        if (text::iequals(pos[i], "dc") || text::iequals(pos[i], "ac")) {
          key = text::to_upper(pos[i]);
          ++i;
          if (i >= pos.size()) throw ParseError(ll.line, key + " without value on " + d.name);
        }
        if (d.params.count(key)) throw ParseError(ll.line, key + " given twice on " + d.name);
        d.params[key] = parse_param_value(pos[i], ll.line, key + " of " + d.name);
        ++i;
      }
      break;
    }
    case 'X': {
      d.kind = DeviceKind::subcircuit;
      if (pos.size() < 2) throw ParseError(ll.line, "dangling terminal: '" + d.name + "' needs nets and a subcircuit");
      d.terminals.assign(pos.begin(), pos.end() - 1);
      d.model = pos.back();
      break;
    }
    default:
      throw ParseError(ll.line, "unsupported device card '" + d.name + "'");
  }
  check_device(d, ll.line);
  return d;
}

bool looks_pmos(std::string_view model) {
  const std::string m = text::to_lower(model);
  if (m.find("nmos") != std::string::npos || m.find("nch") != std::string::npos) return false;
  return (!m.empty() && m[0] == 'p') || m.find("pmos") != std::string::npos ||
         m.find("pch") != std::string::npos;
}

}  // namespace

Netlist parse_netlist(std::string_view source) {
  const auto raw = text::lines(source);
  std::string title;
  std::vector<LogicalLine> logical;
  std::size_t first = 0;
  if (!raw.empty() && text::trim(raw[0]).substr(0, 1) == "*") {
    title = std::string(text::trim(text::trim(raw[0]).substr(1)));
    first = 1;
  }
  for (std::size_t i = first; i < raw.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view t = text::trim(raw[i]);
    if (t.empty() || t.front() == '*') continue;
    if (t.front() == '+') {
      if (logical.empty()) throw ParseError(lineno, "continuation line without a card");
      std::string cont = strip_inline_comment(t.substr(1));
      if (!cont.empty()) logical.back().text += " " + cont;
      continue;
    }
    std::string body = strip_inline_comment(t);
    if (!body.empty()) logical.push_back({lineno, body});
  }

  std::vector<Device> devices;
  std::vector<std::string> cards;
  std::vector<std::size_t> device_lines;
  std::unordered_map<std::string, DeviceKind> model_polarity;
  for (std::size_t i = 0; i < logical.size(); ++i) {
    const auto& ll = logical[i];
    if (ll.text.front() == '.') {
      const auto tokens = text::split_ws(ll.text);
      const std::string directive = text::to_lower(tokens[0]);
      if (directive == ".end") break;
      if (directive == ".subckt") {
        std::string block = ll.text;
        bool closed = false;
        for (++i; i < logical.size(); ++i) {
          block += "\n" + logical[i].text;
          if (text::to_lower(text::split_ws(logical[i].text)[0]) == ".ends") {
            closed = true;
            break;
          }
        }
        if (!closed) throw ParseError(ll.line, "unterminated .subckt");
        cards.push_back(std::move(block));
        continue;
      }
      if (directive == ".ends") throw ParseError(ll.line, ".ends without .subckt");
      if (directive == ".model" && tokens.size() >= 3) {
        std::string type = text::to_lower(tokens[2]);
        if (auto paren = type.find('('); paren != std::string::npos) type.resize(paren);
        if (type == "nmos") model_polarity[tokens[1]] = DeviceKind::nmos;
        if (type == "pmos") model_polarity[tokens[1]] = DeviceKind::pmos;
      }
      cards.push_back(ll.text);
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(ll.text.front()))) {
      throw ParseError(ll.line, "syntax error: unexpected '" + ll.text.substr(0, 16) + "'");
    }
    Device d = parse_device(ll);
    for (std::size_t k = 0; k < devices.size(); ++k) {
      if (devices[k].name == d.name) {
        throw ParseError(ll.line, fmt::format("duplicate device name '{}' (first on line {})", d.name,
                                              device_lines[k]));
      }
    }
    devices.push_back(std::move(d));
    device_lines.push_back(ll.line);
  }
  for (auto& d : devices) {
    if (!is_mos(d.kind)) continue;
    auto it = model_polarity.find(d.model);
    d.kind = it != model_polarity.end() ? it->second
                                        : (looks_pmos(d.model) ? DeviceKind::pmos : DeviceKind::nmos);
  }
  return Netlist::make(std::move(title), std::move(devices), std::move(cards));
}

namespace {

std::string emit_device(const Device& d) {
  std::string line = d.name;
  for (const auto& t : d.terminals) line += " " + t;
  auto params = d.params;
  switch (d.kind) {
    case DeviceKind::nmos:
    case DeviceKind::pmos:
    case DeviceKind::subcircuit:
      line += " " + d.model;
      break;
    case DeviceKind::resistor:
    case DeviceKind::capacitor: {
      const std::string key = d.kind == DeviceKind::resistor ? "R" : "C";
      line += " " + format_value(params.at(key));
      params.erase(key);
      break;
    }
    case DeviceKind::current_source:
    case DeviceKind::voltage_source:
      for (const char* key : {"DC", "AC"}) {
        if (auto it = params.find(key); it != params.end()) {
          line += fmt::format(" {} {}", key, format_value(it->second));
          params.erase(it);
        }
      }
      break;
  }
  for (const auto& [key, value] : params) line += " " + key + "=" + format_value(value);
  return line;
}

}  // namespace

std::string emit_netlist(const Netlist& netlist) {
  std::string out = netlist.title().empty() ? "*\n" : "* " + netlist.title() + "\n";
  std::vector<const Device*> sorted;
  for (const auto& d : netlist.devices()) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
  for (const auto* d : sorted) out += emit_device(*d) + "\n";
  for (const auto& card : netlist.cards()) out += card + "\n";
  out += ".end\n";
  return out;
}

std::string dump_netlist(const Netlist& netlist) {
  std::string out;
  out += "title: " + netlist.title() + "\n";
  out += "ground: " + netlist.ground() + "\n";
  out += "nets: " + text::join({netlist.nets().begin(), netlist.nets().end()}, " ") + "\n";
  std::vector<const Device*> sorted;
  for (const auto& d : netlist.devices()) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
  for (const auto* d : sorted) {
    out += "\ndevice: " + d->name + "\n";
    out += "kind: " + std::string(to_string(d->kind)) + "\n";
    out += "terminals: " + text::join(d->terminals, " ") + "\n";
    if (!d->model.empty()) out += "model: " + d->model + "\n";
    for (const auto& [k, v] : d->params) out += "param." + k + ": " + format_value(v) + "\n";
  }
  return out;
}

bool is_sizable(DeviceKind kind, std::string_view param) {
  switch (kind) {
    case DeviceKind::nmos:
    case DeviceKind::pmos: return param == "W" || param == "L" || param == "M";
    case DeviceKind::resistor: return param == "R";
    case DeviceKind::capacitor: return param == "C";
    case DeviceKind::current_source: return param == "DC";
    default: return false;
  }
}

bool is_integer_param(std::string_view param) { return param == "M"; }

std::vector<Handle> sizable_parameters(const Netlist& netlist) {
  std::vector<Handle> out;
  for (const auto& d : netlist.devices()) {
    switch (d.kind) {
      case DeviceKind::nmos:
      case DeviceKind::pmos:
        for (const char* p : {"L", "M", "W"}) out.push_back({d.name, p});
        break;
      case DeviceKind::resistor: out.push_back({d.name, "R"}); break;
      case DeviceKind::capacitor: out.push_back({d.name, "C"}); break;
      case DeviceKind::current_source: out.push_back({d.name, "DC"}); break;
      default: break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sizekit
