#include "sizekit/relations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

namespace sizekit::relations {

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::equal: return "equal";
    case RelationKind::ratio: return "ratio";
    case RelationKind::bound: return "bound";
    case RelationKind::fix: return "fix";
    case RelationKind::geq: return "geq";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::topology: return "topology";
    case Provenance::agent: return "agent";
    case Provenance::manual: return "manual";
  }
  return "?";
}

std::vector<Handle> SizingRelation::handles() const {
  std::vector<Handle> out;
  for (const auto& d : devices) out.push_back({d, param});
  return out;
}

double EquivalenceClass::multiplier(const Handle& h) const {
  for (const auto& m : members) {
    if (m.handle == h) return m.multiplier;
  }
  throw UnknownHandle(h.str() + " is not in the class of " + representative.str());
}

namespace {

// Index of the first unquoted occurrence of `c`, or npos.
std::size_t find_unquoted(std::string_view s, char c) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
      continue;
    }
    if (s[i] == '"') quoted = !quoted;
    if (!quoted && s[i] == c) return i;
  }
  return std::string_view::npos;
}

std::string squeeze_operators(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto binds_left = [](char c) { return c == '=' || c == '*' || c == ',' || c == '>' || c == '/' || c == ']'; };
  auto binds_right = [](char c) { return c == '=' || c == '*' || c == ',' || c == '>' || c == '/' || c == '['; };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_space(s[i])) {
      std::size_t j = i;
      while (j < s.size() && is_space(s[j])) ++j;
      const bool drop = (!out.empty() && binds_right(out.back())) || (j < s.size() && binds_left(s[j]));
      if (!drop && !out.empty() && j < s.size()) out += ' ';
      i = j - 1;
      continue;
    }
    out += s[i];
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line, std::string_view what) {
  auto slash = token.find('/');
  std::optional<double> v;
  if (slash == std::string_view::npos) {
    v = try_parse_value(token);
  } else {
    auto num = try_parse_value(token.substr(0, slash));
    auto den = try_parse_value(token.substr(slash + 1));
    if (num && den && *den != 0.0) v = *num / *den;
  }
  if (!v) throw ParseError(line, fmt::format("malformed {} '{}'", what, token));
  return *v;
}

void require_positive(double v, std::size_t line, std::string_view what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParseError(line, fmt::format("non-positive {} {}", what, format_value(v)));
  }
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':';
  });
}

std::string require_device(std::string_view s, std::size_t line) {
  if (!is_identifier(s)) throw ParseError(line, fmt::format("malformed record: bad device name '{}'", s));
  return std::string(s);
}

std::string unquote(std::string_view v, std::size_t line) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return std::string(v);
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\') {
      if (i + 2 >= v.size()) throw ParseError(line, "dangling escape in quoted field");
      const char c = v[++i];
      out += c == 'n' ? '\n' : c;
    } else {
      out += v[i];
    }
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

void parse_fields(std::string_view s, SizingRelation& r, std::size_t line) {
  std::size_t i = 0;
  std::set<std::string> seen;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t eq = s.find('=', i);
    if (eq == std::string_view::npos) throw ParseError(line, "malformed field '" + std::string(s.substr(i)) + "'");
    std::string key(text::trim(s.substr(i, eq - i)));
    std::size_t j = eq + 1;
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    std::size_t end = j;
    if (j < s.size() && s[j] == '"') {
      ++end;
      while (end < s.size() && s[end] != '"') {
        if (s[end] == '\\') ++end;
        ++end;
      }
      if (end >= s.size()) throw ParseError(line, "unterminated quoted field " + key);
      ++end;
    } else {
      while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
    }
    std::string value = unquote(s.substr(j, end - j), line);
    if (!seen.insert(key).second) throw ParseError(line, "field " + key + " given twice");
    if (key == "provenance") {
      if (value == "topology") r.provenance = Provenance::topology;
      else if (value == "agent") r.provenance = Provenance::agent;
      else if (value == "manual") r.provenance = Provenance::manual;
      else throw ParseError(line, "unknown provenance '" + value + "'");
    } else if (key == "rationale") {
      r.rationale = value;
    } else if (key == "evidence") {
      r.evidence = value;
    } else {
      throw ParseError(line, "unknown field '" + key + "'");
    }
    i = end;
  }
}

}  // namespace

SizingRelation parse_record(std::string_view record, std::size_t line) {
  SizingRelation r;
  std::string_view body = record;
  if (auto bar = find_unquoted(record, '|'); bar != std::string_view::npos) {
    body = record.substr(0, bar);
    parse_fields(record.substr(bar + 1), r, line);
  }
  const auto tokens = text::split_ws(squeeze_operators(text::trim(body)));
  if (tokens.size() < 3) throw ParseError(line, "malformed record: expected '<kind> <param> <devices...>'");
  const std::string kind = text::to_lower(tokens[0]);
  r.param = text::to_upper(tokens[1]);
  if (!is_identifier(r.param)) throw ParseError(line, "malformed record: bad parameter '" + tokens[1] + "'");

  if (kind == "equal") {
    r.kind = RelationKind::equal;
    for (std::size_t i = 2; i < tokens.size(); ++i) r.devices.push_back(require_device(tokens[i], line));
    if (r.devices.size() < 2) throw ParseError(line, "malformed record: equal needs two or more devices");
    r.coefficients.assign(r.devices.size(), 1.0);
  } else if (kind == "ratio") {
    r.kind = RelationKind::ratio;
    std::string base;
    std::vector<std::pair<std::string, double>> terms;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      const auto& t = tokens[i];
      auto eq = t.find('=');
      if (eq == std::string::npos) throw ParseError(line, "malformed ratio term '" + t + "', expected dev=k*base");
      std::string dev = require_device(t.substr(0, eq), line);
      std::string rhs = t.substr(eq + 1);
      double k = 1.0;
      std::string this_base;
      if (auto star = rhs.find('*'); star != std::string::npos) {
        std::string a = rhs.substr(0, star);
        std::string b = rhs.substr(star + 1);
        if (is_identifier(b) && !try_parse_value(b)) {
          k = parse_number(a, line, "coefficient");
          this_base = b;
        } else {
          k = parse_number(b, line, "coefficient");
          this_base = require_device(a, line);
        }
      } else {
        this_base = require_device(rhs, line);
      }
      require_positive(k, line, "coefficient");
      if (!base.empty() && base != this_base) {
        throw ParseError(line, "malformed ratio: terms use different bases " + base + " and " + this_base);
      }
      base = this_base;
      terms.emplace_back(std::move(dev), k);
    }
    r.devices.push_back(base);
    r.coefficients.push_back(1.0);
    for (auto& [dev, k] : terms) {
      r.devices.push_back(std::move(dev));
      r.coefficients.push_back(k);
    }
    if (std::all_of(r.coefficients.begin(), r.coefficients.end(), [](double k) { return k == 1.0; })) {
      r.kind = RelationKind::equal;
    }
  } else if (kind == "bound") {
    r.kind = RelationKind::bound;
    const auto& last = tokens.back();
    if (last.size() < 5 || last.front() != '[' || last.back() != ']') {
      throw ParseError(line, "malformed bound: expected [lo,hi] as the last field");
    }
    auto parts = text::split(std::string_view(last).substr(1, last.size() - 2), ',');
    if (parts.size() != 2) throw ParseError(line, "malformed bound interval '" + last + "'");
    r.range = {parse_number(parts[0], line, "bound"), parse_number(parts[1], line, "bound")};
    require_positive(r.range.lo, line, "bound");
    if (r.range.lo > r.range.hi) throw ParseError(line, "bound has lo > hi");
    for (std::size_t i = 2; i + 1 < tokens.size(); ++i) r.devices.push_back(require_device(tokens[i], line));
  } else if (kind == "fix") {
    r.kind = RelationKind::fix;
    const auto& last = tokens.back();
    auto eq = last.find('=');
    if (eq == std::string::npos) throw ParseError(line, "malformed fix: expected '<devices> = <value>'");
    r.value = parse_number(last.substr(eq + 1), line, "fixed value");
    require_positive(r.value, line, "fixed value");
    for (std::size_t i = 2; i + 1 < tokens.size(); ++i) r.devices.push_back(require_device(tokens[i], line));
    if (eq > 0) r.devices.push_back(require_device(last.substr(0, eq), line));
  } else if (kind == "geq") {
    r.kind = RelationKind::geq;
    if (tokens.size() != 3) throw ParseError(line, "malformed geq: expected <dev>>=<k>*<dev>");
    const auto& t = tokens[2];
    auto ge = t.find(">=");
    if (ge == std::string::npos) throw ParseError(line, "malformed geq: missing '>='");
    std::string lhs = require_device(t.substr(0, ge), line);
    std::string rhs = t.substr(ge + 2);
    double k = 1.0;
    if (auto star = rhs.find('*'); star != std::string::npos) {
      k = parse_number(rhs.substr(0, star), line, "coefficient");
      rhs = rhs.substr(star + 1);
    }
    require_positive(k, line, "coefficient");
    r.devices = {lhs, require_device(rhs, line)};
    r.coefficients = {1.0, k};
  } else {
    throw ParseError(line, "unknown kind '" + tokens[0] + "'");
  }

  if (r.devices.empty()) throw ParseError(line, "malformed record: no devices");
  std::set<std::string> unique(r.devices.begin(), r.devices.end());
  if (unique.size() != r.devices.size()) throw ParseError(line, "malformed record: device listed twice");
  return r;
}

std::vector<SizingRelation> parse_relations(std::string_view source) {
  std::vector<SizingRelation> out;
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (auto hash = find_unquoted(l, '#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = text::trim(l);
    if (l.empty()) continue;
    out.push_back(parse_record(l, i + 1));
  }
  return out;
}

std::string to_record(const SizingRelation& r) {
  std::string out(to_string(r.kind));
  out += " " + r.param;
  switch (r.kind) {
    case RelationKind::equal:
      for (const auto& d : r.devices) out += " " + d;
      break;
    case RelationKind::ratio:
      for (std::size_t i = 1; i < r.devices.size(); ++i) {
        out += fmt::format(" {}={}*{}", r.devices[i], format_value(r.coefficients[i]), r.devices[0]);
      }
      break;
    case RelationKind::bound:
      for (const auto& d : r.devices) out += " " + d;
      out += fmt::format(" [{},{}]", format_value(r.range.lo), format_value(r.range.hi));
      break;
    case RelationKind::fix:
      for (const auto& d : r.devices) out += " " + d;
      out += " = " + format_value(r.value);
      break;
    case RelationKind::geq:
      out += fmt::format(" {}>={}*{}", r.devices[0], format_value(r.coefficients[1]), r.devices[1]);
      break;
  }
  std::string fields;
  if (r.provenance != Provenance::manual) fields += " provenance=" + std::string(to_string(r.provenance));
  if (!r.rationale.empty()) fields += " rationale=" + quote(r.rationale);
  if (!r.evidence.empty()) fields += " evidence=" + quote(r.evidence);
  if (!fields.empty()) out += " |" + fields;
  return out;
}

std::string to_text(const std::vector<SizingRelation>& rels) {
  std::string out;
  for (const auto& r : rels) out += to_record(r) + "\n";
  return out;
}

Validation validate(const std::vector<SizingRelation>& rels, const Netlist& netlist) {
  Validation v;
  for (const auto& r : rels) {
    std::string reason;
    for (const auto& d : r.devices) {
      const Device* dev = netlist.find(d);
      if (!dev) {
        reason = "unknown device " + d;
        break;
      }
      if (!is_sizable(dev->kind, r.param)) {
        reason = fmt::format("param not applicable: {} on {} ({})", r.param, d, to_string(dev->kind));
        break;
      }
    }
    if (reason.empty()) {
      v.accepted.push_back(r);
    } else {
      v.rejected.push_back({r, reason});
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// normalize

namespace {

bool close(double a, double b) {
  return std::fabs(a - b) <= kRatioTolerance * std::max(std::fabs(a), std::fabs(b));
}

struct Edge {
  std::size_t to;
  double factor;  // value(to) = factor * value(from)
  std::size_t relation;
};

class WeightedUnionFind {
 public:
  std::size_t add() {
    parent_.push_back(parent_.size());
    weight_.push_back(1.0);
    size_.push_back(1);
    return parent_.size() - 1;
  }

  /// Root of x and w with value(x) = w * value(root).
  std::pair<std::size_t, double> find(std::size_t x) {
    if (parent_[x] == x) return {x, 1.0};
    auto [root, w] = find(parent_[x]);
    weight_[x] *= w;
    parent_[x] = root;
    return {root, weight_[x]};
  }

  /// Records value(b) = k * value(a). Returns the implied ratio when a and b are
  /// already connected (no merge happens), otherwise nullopt.
  std::optional<double> unite(std::size_t a, std::size_t b, double k) {
    auto [ra, wa] = find(a);
    auto [rb, wb] = find(b);
    if (ra == rb) return wb / wa;
    // value(rb) = value(b)/wb = k*wa/wb * value(ra)
    if (size_[ra] >= size_[rb]) {
      parent_[rb] = ra;
      weight_[rb] = k * wa / wb;
      size_[ra] += size_[rb];
    } else {
      parent_[ra] = rb;
      weight_[ra] = wb / (k * wa);
      size_[rb] += size_[ra];
    }
    return std::nullopt;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<double> weight_;
  std::vector<std::size_t> size_;
};

std::vector<std::size_t> path_relations(const std::vector<std::vector<Edge>>& adj, std::size_t from,
                                        std::size_t to) {
  std::vector<std::ptrdiff_t> via(adj.size(), -1);
  std::vector<std::size_t> prev(adj.size(), 0);
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (const auto& e : adj[u]) {
      if (seen[e.to]) continue;
      seen[e.to] = true;
      via[e.to] = static_cast<std::ptrdiff_t>(e.relation);
      prev[e.to] = u;
      queue.push_back(e.to);
    }
  }
  std::set<std::size_t> rels;
  for (std::size_t v = to; v != from && via[v] >= 0; v = prev[v]) rels.insert(static_cast<std::size_t>(via[v]));
  return {rels.begin(), rels.end()};
}

std::string describe(const std::vector<SizingRelation>& rels, const std::vector<std::size_t>& idx) {
  std::vector<std::string> parts;
  for (auto i : idx) parts.push_back(fmt::format("#{} '{}'", i + 1, to_record(rels[i])));
  return text::join(parts, ", ");
}

}  // namespace

RelationSet normalize(const std::vector<SizingRelation>& rels) {
  RelationSet rs;
  rs.relations_ = rels;

  std::map<Handle, std::size_t> index;
  std::vector<Handle> handles;
  WeightedUnionFind uf;
  std::vector<std::vector<Edge>> adj;
  auto id = [&](const Handle& h) {
    auto [it, inserted] = index.emplace(h, handles.size());
    if (inserted) {
      handles.push_back(h);
      uf.add();
      adj.emplace_back();
    }
    return it->second;
  };

  std::set<std::string> bound_records, fix_records, geq_records;
  std::map<Handle, std::size_t> fix_source;
  for (std::size_t ri = 0; ri < rels.size(); ++ri) {
    const auto& r = rels[ri];
    const auto hs = r.handles();
    switch (r.kind) {
      case RelationKind::equal:
      case RelationKind::ratio: {
        if (hs.size() < 2 || r.coefficients.size() != hs.size()) {
          throw ParseError(0, "relation #" + std::to_string(ri + 1) + " needs two or more devices with coefficients");
        }
        const std::size_t base = id(hs[0]);
        for (std::size_t i = 1; i < hs.size(); ++i) {
          const double k = r.coefficients[i] / r.coefficients[0];
          const std::size_t other = id(hs[i]);
          if (auto implied = uf.unite(base, other, k)) {
            if (!close(*implied, k)) {
              auto against = path_relations(adj, base, other);
              throw ConflictError(ri, against,
                                  fmt::format("conflict: relation #{} '{}' implies {}/{} = {} but {} imply {}",
                                              ri + 1, to_record(r), hs[i].str(), hs[0].str(), format_value(k),
                                              describe(rels, against), format_value(*implied)));
            }
          }
          adj[base].push_back({other, k, ri});
          adj[other].push_back({base, 1.0 / k, ri});
        }
        break;
      }
      case RelationKind::bound: {
        auto canon = r;
        std::sort(canon.devices.begin(), canon.devices.end());
        bound_records.insert(fmt::format("{} {} {} {}", r.param, text::join(canon.devices, ","),
                                         format_value(r.range.lo), format_value(r.range.hi)));
        for (const auto& h : hs) {
          auto [it, inserted] = rs.bounds_.emplace(h, r.range);
          if (!inserted) it->second = it->second.intersect(r.range);
          if (it->second.empty()) {
            throw InfeasibleBound(fmt::format("bounds on {} have an empty intersection (relation #{} '{}')",
                                              h.str(), ri + 1, to_record(r)));
          }
        }
        break;
      }
      case RelationKind::fix: {
        auto canon = r;
        std::sort(canon.devices.begin(), canon.devices.end());
        fix_records.insert(fmt::format("{} {} {}", r.param, text::join(canon.devices, ","), format_value(r.value)));
        for (const auto& h : hs) {
          auto [it, inserted] = rs.fixes_.emplace(h, r.value);
          if (!inserted && !close(it->second, r.value)) {
            throw ConflictError(ri, {fix_source[h]},
                                fmt::format("conflict: relation #{} fixes {} to {} but {} fixes it to {}", ri + 1,
                                            h.str(), format_value(r.value), describe(rels, {fix_source[h]}),
                                            format_value(it->second)));
          }
          if (inserted) fix_source[h] = ri;
        }
        break;
      }
      case RelationKind::geq: {
        if (hs.size() != 2 || r.coefficients.size() != 2) throw ParseError(0, "geq relation needs two devices");
        geq_records.insert(to_record(SizingRelation{r.devices, r.param, r.kind, r.coefficients, {}, 0.0,
                                                    Provenance::manual, {}, {}}));
        rs.inequalities_.push_back({hs[0], hs[1], r.coefficients[1] / r.coefficients[0]});
        break;
      }
    }
  }

  // Canonical multipliers: BFS from the smallest handle over edges sorted by
  // (neighbour handle, factor), so the result does not depend on input order.
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < handles.size(); ++i) by_root[uf.find(i).first].push_back(i);
  for (auto& edges : adj) {
    std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
      if (handles[a.to] != handles[b.to]) return handles[a.to] < handles[b.to];
      return a.factor < b.factor;
    });
  }
  for (const auto& [root, ids] : by_root) {
    if (ids.size() < 2) continue;
    std::size_t rep = *std::min_element(ids.begin(), ids.end(),
                                        [&](std::size_t a, std::size_t b) { return handles[a] < handles[b]; });
    std::map<std::size_t, double> mult{{rep, 1.0}};
    std::deque<std::size_t> queue{rep};
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (const auto& e : adj[u]) {
        if (mult.count(e.to)) continue;
        mult[e.to] = mult[u] * e.factor;
        queue.push_back(e.to);
      }
    }
    EquivalenceClass cls;
    cls.representative = handles[rep];
    for (const auto& [i, m] : mult) cls.members.push_back({handles[i], m});
    std::sort(cls.members.begin(), cls.members.end(),
              [](const Member& a, const Member& b) { return a.handle < b.handle; });
    rs.classes_.push_back(std::move(cls));
  }
  std::sort(rs.classes_.begin(), rs.classes_.end(),
            [](const auto& a, const auto& b) { return a.representative < b.representative; });

  // Fixed values and bounds must agree across each class.
  for (const auto& cls : rs.classes_) {
    std::optional<std::pair<Handle, double>> implied_rep;
    Interval rep_range{0.0, std::numeric_limits<double>::infinity()};
    for (const auto& m : cls.members) {
      if (auto f = rs.fixes_.find(m.handle); f != rs.fixes_.end()) {
        const double rep_value = f->second / m.multiplier;
        if (implied_rep && !close(implied_rep->second, rep_value)) {
          throw ConflictError(fix_source[m.handle], {fix_source[implied_rep->first]},
                              fmt::format("conflict: fixed {} and {} disagree with their ratio in the class of {}",
                                          implied_rep->first.str(), m.handle.str(), cls.representative.str()));
        }
        if (!implied_rep) implied_rep = {m.handle, rep_value};
      }
      if (auto b = rs.bounds_.find(m.handle); b != rs.bounds_.end()) {
        rep_range = rep_range.intersect({b->second.lo / m.multiplier, b->second.hi / m.multiplier});
      }
    }
    if (rep_range.empty()) {
      throw InfeasibleBound("bounds within the class of " + cls.representative.str() + " do not overlap");
    }
    if (implied_rep && !rep_range.contains(implied_rep->second)) {
      throw InfeasibleBound("fixed value of " + implied_rep->first.str() + " lies outside the class bounds");
    }
  }
  for (const auto& [h, v] : rs.fixes_) {
    if (auto b = rs.bounds_.find(h); b != rs.bounds_.end() && !b->second.contains(v)) {
      throw InfeasibleBound(fmt::format("fixed value {} of {} lies outside its bound", format_value(v), h.str()));
    }
  }
  for (const auto& ineq : rs.inequalities_) {
    const auto* cl = rs.class_of(ineq.lhs);
    if (cl && cl == rs.class_of(ineq.rhs) &&
        cl->multiplier(ineq.lhs) < ineq.k * cl->multiplier(ineq.rhs) * (1 - kRatioTolerance)) {
      throw InfeasibleBound(fmt::format("{} >= {}*{} contradicts their ratio", ineq.lhs.str(),
                                        format_value(ineq.k), ineq.rhs.str()));
    }
  }
  std::sort(rs.inequalities_.begin(), rs.inequalities_.end());
  rs.inequalities_.erase(std::unique(rs.inequalities_.begin(), rs.inequalities_.end()), rs.inequalities_.end());

  rs.bound_records_ = bound_records.size();
  rs.fix_records_ = fix_records.size();
  rs.geq_records_ = geq_records.size();
  return rs;
}

const EquivalenceClass* RelationSet::class_of(const Handle& h) const {
  for (const auto& c : classes_) {
    for (const auto& m : c.members) {
      if (m.handle == h) return &c;
    }
  }
  return nullptr;
}

std::vector<SizingRelation> RelationSet::to_relations() const {
  std::vector<SizingRelation> out;
  for (const auto& c : classes_) {
    SizingRelation r;
    r.param = c.representative.param;
    r.provenance = Provenance::manual;
    bool all_one = true;
    for (const auto& m : c.members) {
      r.devices.push_back(m.handle.device);
      r.coefficients.push_back(m.multiplier);
      all_one = all_one && m.multiplier == 1.0;
    }
    r.kind = all_one ? RelationKind::equal : RelationKind::ratio;
    out.push_back(std::move(r));
  }
  for (const auto& [h, range] : bounds_) {
    SizingRelation r;
    r.kind = RelationKind::bound;
    r.param = h.param;
    r.devices = {h.device};
    r.range = range;
    out.push_back(std::move(r));
  }
  for (const auto& [h, v] : fixes_) {
    SizingRelation r;
    r.kind = RelationKind::fix;
    r.param = h.param;
    r.devices = {h.device};
    r.value = v;
    out.push_back(std::move(r));
  }
  for (const auto& ineq : inequalities_) {
    SizingRelation r;
    r.kind = RelationKind::geq;
    r.param = ineq.lhs.param;
    r.devices = {ineq.lhs.device, ineq.rhs.device};
    r.coefficients = {1.0, ineq.k};
    out.push_back(std::move(r));
  }
  return out;
}

bool operator==(const RelationSet& a, const RelationSet& b) {
  return a.classes_ == b.classes_ && a.bounds_ == b.bounds_ && a.fixes_ == b.fixes_ &&
         a.inequalities_ == b.inequalities_;
}

std::size_t valid_relation_count(const RelationSet& rs) {
  return rs.classes_.size() + rs.bound_records_ + rs.fix_records_ + rs.geq_records_;
}

std::vector<int> stability_report(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) throw std::invalid_argument("stability report needs at least one configuration");
  std::vector<int> out;
  for (const auto& row : counts) {
    if (row.empty()) throw std::invalid_argument("stability report needs at least one attempt per configuration");
    auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    out.push_back(*hi - *lo);
  }
  return out;
}

double residual(const SizingRelation& r, const std::map<Handle, double>& values) {
  auto get = [&](const Handle& h) {
    auto it = values.find(h);
    if (it == values.end()) throw UnknownHandle("no value for " + h.str());
    return it->second;
  };
  const auto hs = r.handles();
  auto rel = [](double actual, double expected) {
    return std::fabs(actual - expected) / std::max(std::fabs(expected), std::numeric_limits<double>::min());
  };
  double worst = 0.0;
  switch (r.kind) {
    case RelationKind::equal:
    case RelationKind::ratio: {
      const double base = get(hs[0]);
      for (std::size_t i = 1; i < hs.size(); ++i) {
        worst = std::max(worst, rel(get(hs[i]), r.coefficients[i] / r.coefficients[0] * base));
      }
      break;
    }
    case RelationKind::bound:
      for (const auto& h : hs) {
        const double v = get(h);
        if (v < r.range.lo) worst = std::max(worst, rel(v, r.range.lo));
        if (v > r.range.hi) worst = std::max(worst, rel(v, r.range.hi));
      }
      break;
    case RelationKind::fix:
      for (const auto& h : hs) worst = std::max(worst, rel(get(h), r.value));
      break;
    case RelationKind::geq: {
      const double need = r.coefficients[1] / r.coefficients[0] * get(hs[1]);
      const double have = get(hs[0]);
      if (have < need) worst = rel(have, need);
      break;
    }
  }
  return worst;
}

}  // namespace sizekit::relations
