#include "sizekit/topology.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "sizekit/text.hpp"

namespace sizekit::topology {

std::string_view to_string(MotifKind kind) {
  return kind == MotifKind::current_mirror ? "current-mirror" : "differential-pair";
}

std::vector<std::string> MotifAnnotation::members() const {
  if (kind == MotifKind::current_mirror) {
    std::vector<std::string> out{reference};
    out.insert(out.end(), outputs.begin(), outputs.end());
    return out;
  }
  return {left, right, tail};
}

namespace {

std::vector<const Device*> sorted_mos(const Netlist& n) {
  std::vector<const Device*> out;
  for (const auto& d : n.devices()) {
    if (is_mos(d.kind)) out.push_back(&d);
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->name < b->name; });
  return out;
}

bool diode_connected(const Device& d) { return d.gate() == d.drain(); }

std::set<std::string> rail_nets(const Netlist& n) {
  std::set<std::string> rails{n.ground()};
  for (const auto& d : n.devices()) {
    if (d.kind == DeviceKind::voltage_source) rails.insert(d.terminals.begin(), d.terminals.end());
  }
  return rails;
}

// Device feeding `net` as a tail, excluding the pair members. Smallest name wins.
std::string find_tail(const Netlist& n, const std::string& net, const std::string& a,
                      const std::string& b) {
  std::string best;
  for (const auto& d : n.devices()) {
    if (d.name == a || d.name == b) continue;
    bool feeds = false;
    if (is_mos(d.kind)) feeds = d.drain() == net;
    if (d.kind == DeviceKind::current_source) {
      feeds = std::find(d.terminals.begin(), d.terminals.end(), net) != d.terminals.end();
    }
    if (feeds && (best.empty() || d.name < best)) best = d.name;
  }
  return best;
}

}  // namespace

std::vector<MotifAnnotation> detect_current_mirrors(const Netlist& netlist) {
  std::map<std::tuple<DeviceKind, std::string, std::string>, std::vector<const Device*>> groups;
  for (const auto* d : sorted_mos(netlist)) groups[{d->kind, d->gate(), d->source()}].push_back(d);

  std::vector<MotifAnnotation> out;
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    std::vector<const Device*> diodes;
    for (const auto* d : members) {
      if (diode_connected(*d)) diodes.push_back(d);
    }
    if (diodes.size() != 1) continue;
    MotifAnnotation a;
    a.kind = MotifKind::current_mirror;
    a.reference = diodes.front()->name;
    for (const auto* d : members) {
      if (d != diodes.front()) a.outputs.push_back(d->name);
    }
    a.evidence = fmt::format("{} diode-connected (gate=drain={}); {} share gate {} and source {} ({})",
                             a.reference, std::get<1>(key), text::join(a.outputs, ","),
                             std::get<1>(key), std::get<2>(key), to_string(std::get<0>(key)));
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.reference < y.reference; });
  return out;
}

std::vector<MotifAnnotation> detect_differential_pairs(const Netlist& netlist) {
  const auto mos = sorted_mos(netlist);
  const auto rails = rail_nets(netlist);
  std::vector<MotifAnnotation> out;
  for (std::size_t i = 0; i < mos.size(); ++i) {
    for (std::size_t j = i + 1; j < mos.size(); ++j) {
      const Device& l = *mos[i];
      const Device& r = *mos[j];
      if (l.kind != r.kind || l.source() != r.source() || l.gate() == r.gate()) continue;
      if (rails.count(l.source())) continue;
      std::string tail = find_tail(netlist, l.source(), l.name, r.name);
      if (tail.empty()) continue;
      MotifAnnotation a;
      a.kind = MotifKind::differential_pair;
      a.left = l.name;
      a.right = r.name;
      a.tail = tail;
      a.evidence = fmt::format("{} and {} ({}) share source net {} fed by {}; gates {} / {}", l.name,
                               r.name, to_string(l.kind), l.source(), tail, l.gate(), r.gate());
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<MotifAnnotation> detect_motifs(const Netlist& netlist) {
  auto out = detect_current_mirrors(netlist);
  auto pairs = detect_differential_pairs(netlist);
  out.insert(out.end(), pairs.begin(), pairs.end());
  return out;
}

bool holds(const MotifAnnotation& a, const Netlist& netlist) {
  auto mos = [&](const std::string& name) -> const Device* {
    const Device* d = netlist.find(name);
    return d && is_mos(d->kind) ? d : nullptr;
  };
  if (a.kind == MotifKind::current_mirror) {
    const Device* ref = mos(a.reference);
    if (!ref || !diode_connected(*ref) || a.outputs.empty()) return false;
    for (const auto& name : a.outputs) {
      const Device* d = mos(name);
      if (!d || d->kind != ref->kind || d->gate() != ref->gate() || d->source() != ref->source() ||
          diode_connected(*d)) {
        return false;
      }
    }
    return true;
  }
  const Device* l = mos(a.left);
  const Device* r = mos(a.right);
  const Device* t = netlist.find(a.tail);
  if (!l || !r || !t || l->kind != r->kind || l->source() != r->source() || l->gate() == r->gate()) {
    return false;
  }
  if (rail_nets(netlist).count(l->source())) return false;
  if (is_mos(t->kind)) return t->drain() == l->source();
  if (t->kind == DeviceKind::current_source) {
    return std::find(t->terminals.begin(), t->terminals.end(), l->source()) != t->terminals.end();
  }
  return false;
}

std::vector<relations::SizingRelation> motif_seed_relations(const std::vector<MotifAnnotation>& annotations) {
  using relations::RelationKind;
  using relations::SizingRelation;
  std::vector<SizingRelation> out;
  auto equal = [](std::vector<std::string> devices, const char* param, const std::string& why) {
    SizingRelation r;
    r.kind = RelationKind::equal;
    r.param = param;
    r.coefficients.assign(devices.size(), 1.0);
    r.devices = std::move(devices);
    r.provenance = relations::Provenance::topology;
    r.rationale = why;
    return r;
  };
  for (const auto& a : annotations) {
    if (a.kind == MotifKind::differential_pair) {
      const std::string why = "differential pair " + a.left + "/" + a.right;
      out.push_back(equal({a.left, a.right}, "W", why));
      out.push_back(equal({a.left, a.right}, "L", why));
    } else {
      for (const auto& o : a.outputs) {
        out.push_back(equal({a.reference, o}, "L", "current mirror " + a.reference + "->" + o));
      }
    }
  }
  return out;
}

std::string serialize_annotations(const std::vector<MotifAnnotation>& annotations) {
  std::string out;
  for (const auto& a : annotations) {
    if (a.kind == MotifKind::current_mirror) {
      out += fmt::format("# motif current-mirror ref={} out={} : {}\n", a.reference,
                         text::join(a.outputs, ","), a.evidence);
    } else {
      out += fmt::format("# motif differential-pair left={} right={} tail={} : {}\n", a.left, a.right,
                         a.tail, a.evidence);
    }
    for (const auto& r : motif_seed_relations({a})) out += relations::to_record(r) + "\n";
  }
  return out;
}

}  // namespace sizekit::topology
