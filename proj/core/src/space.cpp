#include "sizekit/space.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

namespace sizekit::space {

std::string_view to_string(Scale s) { return s == Scale::log ? "log" : "linear"; }

namespace {

Scale parse_scale(std::string_view s, std::size_t line) {
  if (s == "log") return Scale::log;
  if (s == "linear") return Scale::linear;
  throw ParseError(line, "unknown scale '" + std::string(s) + "'");
}

Interval checked_interval(const std::string& lo, const std::string& hi, std::size_t line) {
  auto l = try_parse_value(lo);
  auto h = try_parse_value(hi);
  if (!l || !h) throw ParseError(line, "bad bound values '" + lo + "' '" + hi + "'");
  if (!(*l > 0.0)) throw ParseError(line, "bound lo must be > 0");
  if (!(*l < *h)) throw ParseError(line, "bound needs lo < hi");
  return {*l, *h};
}

double width(const Interval& b, Scale s) {
  return s == Scale::log ? std::log(b.hi / b.lo) : b.hi - b.lo;
}

}  // namespace

BoundTable BoundTable::parse(std::string_view source) {
  BoundTable t;
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    auto tok = text::split_ws(l);
    if (tok.empty()) continue;
    if (tok.size() != 5 && tok.size() != 6) throw ParseError(i + 1, "expected '<default|override> <name> <param> <lo> <hi> [scale]'");
    Entry e;
    e.range = checked_interval(tok[3], tok[4], i + 1);
    const std::string param = text::to_upper(tok[2]);
    e.scale = tok.size() == 6 ? parse_scale(tok[5], i + 1) : (is_integer_param(param) ? Scale::linear : Scale::log);
    if (tok[0] == "default") {
      DeviceKind kind;
      try {
        kind = device_kind_from_string(tok[1]);
      } catch (const ConfigError& err) {
        throw ParseError(i + 1, err.what());
      }
      t.defaults[{kind, param}] = e;
    } else if (tok[0] == "override") {
      t.overrides[{tok[1], param}] = e;
    } else {
      throw ParseError(i + 1, "unknown entry '" + tok[0] + "'");
    }
  }
  return t;
}

void BoundTable::merge(const BoundTable& other) {
  for (const auto& [k, v] : other.defaults) defaults[k] = v;
  for (const auto& [k, v] : other.overrides) overrides[k] = v;
}

std::string BoundTable::to_text() const {
  std::string out;
  for (const auto& [key, e] : defaults) {
    out += fmt::format("default {} {} {} {} {}\n", to_string(key.first), key.second, format_value(e.range.lo),
                       format_value(e.range.hi), to_string(e.scale));
  }
  for (const auto& [h, e] : overrides) {
    out += fmt::format("override {} {} {} {} {}\n", h.device, h.param, format_value(e.range.lo),
                       format_value(e.range.hi), to_string(e.scale));
  }
  return out;
}

BoundTable default_bound_table() {
  BoundTable t;
  for (auto kind : {DeviceKind::nmos, DeviceKind::pmos}) {
    t.defaults[{kind, "W"}] = {{0.5e-6, 50e-6}, Scale::log};
    t.defaults[{kind, "L"}] = {{0.18e-6, 5e-6}, Scale::log};
    t.defaults[{kind, "M"}] = {{1.0, 8.0}, Scale::linear};
  }
  t.defaults[{DeviceKind::resistor, "R"}] = {{1e3, 10e6}, Scale::log};
  t.defaults[{DeviceKind::capacitor, "C"}] = {{0.1e-12, 20e-12}, Scale::log};
  t.defaults[{DeviceKind::current_source, "DC"}] = {{10e-9, 100e-6}, Scale::log};
  return t;
}

ParameterSpace::ParameterSpace(std::vector<Handle> handles, std::vector<Interval> bounds, std::vector<Scale> scales)
    : handles_(std::move(handles)), bounds_(std::move(bounds)), scales_(std::move(scales)) {
  if (bounds_.size() != handles_.size() || scales_.size() != handles_.size()) {
    throw std::invalid_argument("parameter space: mismatched sizes");
  }
  std::vector<std::size_t> order(handles_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return handles_[a] < handles_[b]; });
  std::vector<Handle> h;
  std::vector<Interval> b;
  std::vector<Scale> s;
  for (auto i : order) {
    h.push_back(handles_[i]);
    b.push_back(bounds_[i]);
    s.push_back(scales_[i]);
  }
  handles_ = std::move(h);
  bounds_ = std::move(b);
  scales_ = std::move(s);
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    if (i > 0 && handles_[i] == handles_[i - 1]) throw ConfigError("duplicate handle " + handles_[i].str());
    const bool lo_ok = scales_[i] == Scale::linear || bounds_[i].lo > 0.0;
    if (!lo_ok || !(bounds_[i].lo < bounds_[i].hi) || !std::isfinite(bounds_[i].hi)) {
      throw ConfigError(fmt::format("bounds of {} must satisfy lo < hi (and lo > 0 on a log scale), got [{}, {}]",
                                    handles_[i].str(), format_value(bounds_[i].lo), format_value(bounds_[i].hi)));
    }
  }
}

std::size_t ParameterSpace::index_of(const Handle& h) const {
  auto it = std::lower_bound(handles_.begin(), handles_.end(), h);
  if (it != handles_.end() && *it == h) return static_cast<std::size_t>(it - handles_.begin());
  return handles_.size();
}

ParameterSpace build_space(const Netlist& netlist, const BoundTable& table) {
  const auto handles = sizable_parameters(netlist);
  for (const auto& [h, e] : table.overrides) {
    if (!std::binary_search(handles.begin(), handles.end(), h)) {
      throw UnknownHandle("bound override for " + h.str() + " names no sizable parameter");
    }
  }
  std::vector<Interval> bounds;
  std::vector<Scale> scales;
  for (const auto& h : handles) {
    if (auto o = table.overrides.find(h); o != table.overrides.end()) {
      if (!(o->second.range.lo < o->second.range.hi)) throw ConfigError("override for " + h.str() + " has lo >= hi");
      bounds.push_back(o->second.range);
      scales.push_back(o->second.scale);
      continue;
    }
    const auto kind = netlist.find(h.device)->kind;
    auto d = table.defaults.find({kind, h.param});
    if (d == table.defaults.end()) {
      throw ConfigError(fmt::format("no default bounds for {} {} (needed by {})", to_string(kind), h.param, h.str()));
    }
    bounds.push_back(d->second.range);
    scales.push_back(d->second.scale);
  }
  return ParameterSpace(handles, std::move(bounds), std::move(scales));
}

// ---------------------------------------------------------------------------

PrunedSpace prune(const ParameterSpace& space, const relations::RelationSet& rs) {
  auto require = [&](const Handle& h) {
    const auto i = space.index_of(h);
    if (i == space.dim()) throw UnknownHandle(h.str() + " is not a sizable parameter of this space");
    return i;
  };
  for (const auto& c : rs.classes()) {
    for (const auto& m : c.members) require(m.handle);
  }
  for (const auto& [h, b] : rs.bounds()) require(h);
  for (const auto& [h, v] : rs.fixes()) require(h);
  for (const auto& q : rs.inequalities()) {
    require(q.lhs);
    require(q.rhs);
  }

  PrunedSpace ps(space, rs);
  const std::size_t n = space.dim();
  ps.bindings_.resize(n);
  std::vector<bool> done(n, false);

  auto member_range = [&](std::size_t i) {
    Interval b = space.bounds()[i];
    if (auto it = rs.bounds().find(space.handles()[i]); it != rs.bounds().end()) b = b.intersect(it->second);
    if (b.empty()) throw InfeasibleBound("relation bound on " + space.handles()[i].str() + " lies outside its search range");
    return b;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    const Handle& h = space.handles()[i];
    const bool integer = is_integer_param(h.param);
    std::vector<std::pair<std::size_t, double>> members{{i, 1.0}};
    if (const auto* cls = rs.class_of(h)) {
      members.clear();
      for (const auto& m : cls->members) members.emplace_back(space.index_of(m.handle), m.multiplier);
    }
    // value(member) = mult * value(rep); the class representative has mult 1.
    std::optional<double> fixed_rep;
    for (const auto& [idx, mult] : members) {
      if (auto f = rs.fixes().find(space.handles()[idx]); f != rs.fixes().end()) {
        fixed_rep = f->second / mult;
        break;
      }
    }
    if (fixed_rep) {
      for (const auto& [idx, mult] : members) {
        Binding b;
        b.kind = Binding::Kind::fixed;
        b.value = mult * *fixed_rep;
        b.multiplier = mult;
        b.integer = integer;
        ps.bindings_[idx] = b;
        done[idx] = true;
      }
      continue;
    }
    Interval range{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& [idx, mult] : members) {
      const Interval b = member_range(idx);
      range = range.intersect({b.lo / mult, b.hi / mult});
    }
    const std::size_t rep_idx = members.front().first;
    if (range.empty()) {
      throw InfeasibleBound(fmt::format("projected bounds of {} are empty", space.handles()[rep_idx].str()));
    }
    FreeVariable fv;
    fv.representative = space.handles()[rep_idx];
    fv.bounds = range;
    fv.scale = space.scales()[rep_idx];
    fv.integer = integer;
    const std::size_t fi = ps.free_.size();
    ps.free_.push_back(fv);
    for (const auto& [idx, mult] : members) {
      Binding b;
      b.kind = Binding::Kind::free;
      b.free_index = fi;
      b.multiplier = mult;
      b.integer = integer;
      ps.bindings_[idx] = b;
      done[idx] = true;
    }
  }

  for (const auto& q : rs.inequalities()) {
    ResidualInequality r;
    r.label = fmt::format("{} >= {}*{}", q.lhs.str(), format_value(q.k), q.rhs.str());
    auto add = [&](const Handle& h, double sign) {
      const auto& b = ps.bindings_[space.index_of(h)];
      if (b.kind == Binding::Kind::fixed) {
        r.constant += sign * b.value;
        return;
      }
      for (auto& [fi, c] : r.coefficients) {
        if (fi == b.free_index) {
          c += sign * b.multiplier;
          return;
        }
      }
      r.coefficients.emplace_back(b.free_index, sign * b.multiplier);
    };
    add(q.lhs, 1.0);
    add(q.rhs, -q.k);
    if (r.coefficients.empty() || std::all_of(r.coefficients.begin(), r.coefficients.end(),
                                              [](const auto& c) { return c.second == 0.0; })) {
      if (r.constant < 0.0) throw InfeasibleBound("inequality " + r.label + " cannot hold");
      continue;
    }
    ps.residual_.push_back(std::move(r));
  }
  return ps;
}

PrunedSpace unpruned(const ParameterSpace& space) { return prune(space, relations::normalize({})); }

bool PrunedSpace::contains(std::span<const double> x) const {
  if (x.size() != free_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& b = free_[i].bounds;
    const double slack = 1e-12 * std::max(std::fabs(b.lo), std::fabs(b.hi));
    if (!(x[i] >= b.lo - slack && x[i] <= b.hi + slack)) return false;
  }
  return true;
}

std::vector<double> PrunedSpace::expand_values(std::span<const double> x) const {
  if (x.size() != free_.size()) {
    throw std::out_of_range(fmt::format("free vector has {} entries, space has {}", x.size(), free_.size()));
  }
  if (!contains(x)) throw std::out_of_range("free vector lies outside the pruned box");
  std::vector<double> out(bindings_.size());
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    const auto& b = bindings_[i];
    double v = b.kind == Binding::Kind::fixed ? b.value : b.multiplier * x[b.free_index];
    if (b.integer) v = std::max(1.0, std::round(v));
    out[i] = v;
  }
  return out;
}

Assignment PrunedSpace::expand(std::span<const double> x) const {
  const auto values = expand_values(x);
  Assignment a;
  for (std::size_t i = 0; i < values.size(); ++i) a.emplace(full_.handles()[i], values[i]);
  return a;
}

double PrunedSpace::infeasibility(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& r : residual_) {
    double lhs = r.constant;
    double scale = std::fabs(r.constant);
    for (const auto& [fi, c] : r.coefficients) {
      lhs += c * x[fi];
      scale += std::fabs(c * x[fi]);
    }
    if (lhs < -1e-12 * scale) total += -lhs / std::max(scale, std::numeric_limits<double>::min());
  }
  return total;
}

bool PrunedSpace::feasible(std::span<const double> x) const { return infeasibility(x) == 0.0; }

std::vector<double> PrunedSpace::to_unit(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = free_[i];
    const double w = width(f.bounds, f.scale);
    if (w <= 0.0) {
      u[i] = 0.0;
      continue;
    }
    u[i] = f.scale == Scale::log ? std::log(x[i] / f.bounds.lo) / w : (x[i] - f.bounds.lo) / w;
  }
  return u;
}

std::vector<double> PrunedSpace::from_unit(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& f = free_[i];
    const double t = std::clamp(u[i], 0.0, 1.0);
    double v = f.scale == Scale::log ? f.bounds.lo * std::exp(t * std::log(f.bounds.hi / f.bounds.lo))
                                     : f.bounds.lo + t * (f.bounds.hi - f.bounds.lo);
    x[i] = std::clamp(v, f.bounds.lo, f.bounds.hi);
  }
  return x;
}

std::string PrunedSpace::report() const {
  std::string out = fmt::format("full dimensions: {}\nfree dimensions: {}\n", full_.dim(), free_.size());
  out += "\nfree variables:\n";
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const auto& f = free_[i];
    std::vector<std::string> deps;
    for (std::size_t j = 0; j < bindings_.size(); ++j) {
      const auto& b = bindings_[j];
      if (b.kind == Binding::Kind::free && b.free_index == i && full_.handles()[j] != f.representative) {
        deps.push_back(fmt::format("{}={}x", full_.handles()[j].str(), format_value(b.multiplier)));
      }
    }
    out += fmt::format("  x{} {} in [{}, {}] {}{}{}\n", i, f.representative.str(), format_eng(f.bounds.lo),
                       format_eng(f.bounds.hi), to_string(f.scale), f.integer ? " integer" : "",
                       deps.empty() ? "" : "  -> " + text::join(deps, " "));
  }
  std::vector<std::string> fixed;
  for (std::size_t j = 0; j < bindings_.size(); ++j) {
    if (bindings_[j].kind == Binding::Kind::fixed) {
      fixed.push_back(fmt::format("{}={}", full_.handles()[j].str(), format_eng(bindings_[j].value)));
    }
  }
  if (!fixed.empty()) out += "\nfixed:\n  " + text::join(fixed, "\n  ") + "\n";
  if (!residual_.empty()) {
    out += "\nresidual inequalities:\n";
    for (const auto& r : residual_) out += "  " + r.label + "\n";
  }
  const auto red = volume_reduction(full_, *this);
  out += fmt::format("\ndimension reduction: {}\nlog volume ratio: {:.6g}\nvalid relations: {}\n", red.dims_removed,
                     red.log_volume_ratio, relations::valid_relation_count(relations_));
  return out;
}

double VolumeReduction::volume_ratio() const { return std::exp(log_volume_ratio); }

VolumeReduction volume_reduction(const ParameterSpace& space, const PrunedSpace& pruned) {
  VolumeReduction r;
  r.dims_removed = space.dim() - pruned.dim();
  double full = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) full += std::log(width(space.bounds()[i], space.scales()[i]));
  double reduced = 0.0;
  for (const auto& f : pruned.free()) reduced += std::log(width(f.bounds, f.scale));
  r.log_volume_ratio = reduced - full;
  return r;
}

}  // namespace sizekit::space
