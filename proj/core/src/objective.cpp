#include "sizekit/objective.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

namespace sizekit::opt {

ObjectiveSpec ObjectiveSpec::parse(std::string_view source) {
  ObjectiveSpec spec;
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    auto tok = text::split_ws(l);
    if (tok.empty()) continue;
    const std::size_t line = i + 1;
    std::optional<double> norm;
    if (tok.size() > 3 && text::starts_with_ci(tok.back(), "norm=")) {
      norm = try_parse_value(tok.back().substr(5));
      if (!norm) throw ParseError(line, "bad normalizer '" + tok.back() + "'");
      tok.pop_back();
    }
    auto number = [&](const std::string& s) {
      auto v = try_parse_value(s.front() == '-' ? s.substr(1) : s);
      if (!v) throw ParseError(line, "bad threshold '" + s + "'");
      return s.front() == '-' ? -*v : *v;
    };
    MetricSpec m;
    if (tok.size() < 3) throw ParseError(line, "expected '<name> <max|min|range> <threshold...>'");
    m.name = tok[0];
    const std::string dir = text::to_lower(tok[1]);
    if (dir == "max" || dir == "maximize") {
      if (tok.size() != 3) throw ParseError(line, "max takes one threshold");
      m.direction = Direction::maximize;
      m.threshold = number(tok[2]);
      m.normalizer = m.threshold != 0.0 ? std::fabs(m.threshold) : 1.0;
    } else if (dir == "min" || dir == "minimize") {
      if (tok.size() != 3) throw ParseError(line, "min takes one threshold");
      m.direction = Direction::minimize;
      m.threshold = number(tok[2]);
      m.normalizer = m.threshold != 0.0 ? std::fabs(m.threshold) : 1.0;
    } else if (dir == "range" || dir == "inside-range") {
      if (tok.size() != 4) throw ParseError(line, "range takes lo and hi");
      m.direction = Direction::inside_range;
      m.lo = number(tok[2]);
      m.hi = number(tok[3]);
      m.normalizer = m.hi - m.lo;
    } else {
      throw ParseError(line, "unknown direction '" + tok[1] + "'");
    }
    if (norm) m.normalizer = *norm;
    spec.metrics.push_back(m);
  }
  spec.validate();
  return spec;
}

std::string ObjectiveSpec::to_text() const {
  std::string out;
  for (const auto& m : metrics) {
    switch (m.direction) {
      case Direction::maximize:
        out += fmt::format("{} max {} norm={}\n", m.name, format_value(m.threshold), format_value(m.normalizer));
        break;
      case Direction::minimize:
        out += fmt::format("{} min {} norm={}\n", m.name, format_value(m.threshold), format_value(m.normalizer));
        break;
      case Direction::inside_range:
        out += fmt::format("{} range {} {} norm={}\n", m.name, format_value(m.lo), format_value(m.hi),
                           format_value(m.normalizer));
        break;
    }
  }
  return out;
}

void ObjectiveSpec::validate() const {
  for (const auto& m : metrics) {
    if (m.direction == Direction::inside_range) {
      if (!std::isfinite(m.lo) || !std::isfinite(m.hi) || !(m.lo < m.hi)) {
        throw ConfigError("metric " + m.name + ": range needs finite lo < hi");
      }
    } else if (!std::isfinite(m.threshold)) {
      throw ConfigError("metric " + m.name + ": threshold must be finite");
    }
    if (!(m.normalizer > 0.0) || !std::isfinite(m.normalizer)) {
      throw ConfigError("metric " + m.name + ": normalizer must be > 0");
    }
  }
}

std::vector<std::string> ObjectiveSpec::names() const {
  std::vector<std::string> out;
  for (const auto& m : metrics) out.push_back(m.name);
  return out;
}

double violation(const MetricSpec& spec, double value) {
  double v = 0.0;
  switch (spec.direction) {
    case Direction::maximize: v = spec.threshold - value; break;
    case Direction::minimize: v = value - spec.threshold; break;
    case Direction::inside_range:
      v = value < spec.lo ? spec.lo - value : (value > spec.hi ? value - spec.hi : 0.0);
      break;
  }
  if (std::isnan(value)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, v) / spec.normalizer;
}

double fom(const ObjectiveSpec& spec, const std::map<std::string, double>& metrics) {
  double total = 0.0;
  for (const auto& m : spec.metrics) {
    auto it = metrics.find(m.name);
    if (it == metrics.end()) throw ConfigError("missing metric '" + m.name + "'");
    total += violation(m, it->second);
  }
  return total;
}

EvalResult score(const ObjectiveSpec& spec, const Measurement& m, double wall_time) {
  EvalResult r;
  r.metrics = m.metrics;
  r.failed = m.failed;
  r.oscillation = m.oscillation;
  r.wall_time = wall_time;
  if (m.failed) {
    r.fom = kFailedFom;
    r.feasible = false;
    return r;
  }
  r.fom = fom(spec, m.metrics);
  if (m.oscillation) r.fom += kOscillationPenalty;
  r.feasible = r.fom == 0.0;
  return r;
}

}  // namespace sizekit::opt
