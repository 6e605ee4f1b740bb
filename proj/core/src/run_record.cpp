#include "sizekit/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

namespace sizekit::opt {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

double parse_num(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string("-");
}

}  // namespace

std::string history_log(const RunRecord& run, const std::vector<std::string>& metric_names) {
  std::string out = fmt::format("# algorithm={} seed={} init={} batch={} max_iterations={}\n", run.algorithm, run.seed,
                                run.init_points, run.batch, run.max_iterations);
  out += "# iteration\tindex\tx\t";
  for (const auto& m : metric_names) out += m + "\t";
  out += "fom\tfeasible\tfailed\tbest\n";
  for (const auto& e : run.history) {
    std::vector<std::string> xs;
    for (double v : e.x) xs.push_back(num(v));
    out += fmt::format("{}\t{}\t{}\t", e.iteration, e.index, text::join(xs, ","));
    for (const auto& m : metric_names) {
      auto it = e.result.metrics.find(m);
      out += (it == e.result.metrics.end() ? std::string("-") : num(it->second)) + "\t";
    }
    out += fmt::format("{}\t{}\t{}\t{}\n", num(e.result.fom), e.result.feasible ? 1 : 0, e.result.failed ? 1 : 0,
                       num(e.best_fom));
  }
  return out;
}

std::string summary_header() {
  return "seed\tpassed\tevaluations_to_pass\titerations_to_pass\tevaluations\tbest_fom\ttime\tbudget_time";
}

RunSummary summarize(const RunRecord& run) {
  RunSummary s;
  s.seed = run.seed;
  s.passed = run.passed();
  s.evaluations_to_pass = run.evaluations_to_pass;
  s.iterations_to_pass = run.iterations_to_pass;
  s.evaluations = run.history.size();
  s.best_fom = run.history.empty() ? kFailedFom : run.best().result.fom;
  s.time = run.charged_time();
  s.budget_time = run.budget_time;
  return s;
}

std::string summary_line(const RunRecord& run) {
  const auto s = summarize(run);
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", s.seed, s.passed ? 1 : 0, opt_str(s.evaluations_to_pass),
                     opt_str(s.iterations_to_pass), s.evaluations, num(s.best_fom), num(s.time), num(s.budget_time));
}

std::vector<RunSummary> parse_summaries(std::string_view source) {
  std::vector<RunSummary> out;
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto l = text::trim(lines[i]);
    if (l.empty() || l.front() == '#' || text::starts_with_ci(l, "seed\t")) continue;
    const auto f = text::split(l, '\t');
    if (f.size() != 8) throw ParseError(i + 1, "summary row needs 8 tab-separated fields");
    try {
      RunSummary s;
      s.seed = std::stoull(f[0]);
      s.passed = f[1] == "1";
      if (f[2] != "-") s.evaluations_to_pass = std::stoull(f[2]);
      if (f[3] != "-") s.iterations_to_pass = std::stoull(f[3]);
      s.evaluations = std::stoull(f[4]);
      s.best_fom = parse_num(f[5]);
      s.time = parse_num(f[6]);
      s.budget_time = parse_num(f[7]);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw ParseError(i + 1, "bad number in summary row");
    }
  }
  return out;
}

ArmStats arm_stats(std::string label, const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("arm '" + label + "' has no runs");
  ArmStats a;
  a.label = std::move(label);
  a.runs = runs.size();
  double total = 0.0;
  std::vector<double> evals;
  for (const auto& r : runs) {
    total += r.passed ? r.time : r.budget_time;
    if (r.passed) ++a.passed;
    if (r.evaluations_to_pass) evals.push_back(static_cast<double>(*r.evaluations_to_pass));
  }
  a.mean_time = total / static_cast<double>(runs.size());
  if (!evals.empty()) {
    std::sort(evals.begin(), evals.end());
    const std::size_t n = evals.size();
    a.median_evaluations_to_pass = n % 2 ? evals[n / 2] : 0.5 * (evals[n / 2 - 1] + evals[n / 2]);
  }
  return a;
}

Comparison compare_runs(const std::vector<RunSummary>& a, const std::vector<RunSummary>& b, std::string label_a,
                        std::string label_b) {
  Comparison c;
  c.a = arm_stats(std::move(label_a), a);
  c.b = arm_stats(std::move(label_b), b);
  c.speedup = c.a.mean_time > 0.0 ? c.b.mean_time / c.a.mean_time : std::numeric_limits<double>::infinity();
  return c;
}

Comparison compare_runs(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b, std::string label_a,
                        std::string label_b) {
  std::vector<RunSummary> sa, sb;
  for (const auto& r : a) sa.push_back(summarize(r));
  for (const auto& r : b) sb.push_back(summarize(r));
  return compare_runs(sa, sb, std::move(label_a), std::move(label_b));
}

std::string comparison_table(const Comparison& c) {
  const std::size_t w = std::max<std::size_t>({c.a.label.size(), c.b.label.size(), 3});
  std::string out = fmt::format("{:<{}}  {:>14}  {:>9}  {:>12}\n", "Arm", w, "Time (s)", "Pass Rate", "Median evals");
  for (const auto* arm : {&c.a, &c.b}) {
    out += fmt::format("{:<{}}  {:>14.2f}  {:>9}  {:>12}\n", arm->label, w, arm->mean_time,
                       fmt::format("{}/{}", arm->passed, arm->runs),
                       arm->median_evaluations_to_pass ? fmt::format("{}", *arm->median_evaluations_to_pass) : "-");
  }
  out += fmt::format("Speedup ({} vs {}): {:.2f}x\n", c.a.label, c.b.label, c.speedup);
  return out;
}

std::string incumbent_curves(const std::vector<RunRecord>& runs) {
  std::size_t rows = 0;
  for (const auto& r : runs) rows = std::max(rows, r.history.size());
  std::string out = "# evaluations";
  for (const auto& r : runs) out += fmt::format("\tseed{}", r.seed);
  out += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += fmt::format("{}", i + 1);
    for (const auto& r : runs) {
      const double v = r.history.empty() ? kFailedFom : r.history[std::min(i, r.history.size() - 1)].best_fom;
      out += "\t" + num(v);
    }
    out += "\n";
  }
  return out;
}

}  // namespace sizekit::opt
