#include "sizekit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/extraction.hpp"
#include "sizekit/synthetic.hpp"
#include "sizekit/text.hpp"
#include "sizekit/topology.hpp"

namespace sizekit::pipeline {

std::string to_string(Arm a) { return a == Arm::constrained ? "constrained" : "unconstrained"; }

Arm arm_from_string(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "constrained" || l == "pruned") return Arm::constrained;
  if (l == "unconstrained" || l == "full") return Arm::unconstrained;
  throw ConfigError("unknown arm '" + std::string(s) + "' (expected constrained or unconstrained)");
}

namespace {

std::string read_required(const config::Config& cfg, const std::string& section, const std::string& key) {
  const auto p = cfg.path(section, key);
  if (!p) throw ConfigError("missing required setting " + section + "." + key);
  return text::read_file(*p);
}

space::ParameterSpace problem_space(const config::Config& cfg, const eval::EvaluatorSpec& es,
                                    const std::optional<Netlist>& netlist) {
  if (es.kind == eval::EvaluatorKind::synthetic) return eval::synthetic_space(es.function, es.dim);
  auto table = space::default_bound_table();
  if (cfg.path("run", "bounds")) table.merge(space::BoundTable::parse(read_required(cfg, "run", "bounds")));
  return space::build_space(*netlist, table);
}

void write_new(const std::filesystem::path& p, const std::string& content) {
  if (std::filesystem::exists(p)) throw Error("refusing to overwrite " + p.string());
  text::write_file(p.string(), content);
}

}  // namespace

Problem load_problem(const config::Config& cfg) {
  Problem p{std::nullopt, space::ParameterSpace({}, {}, {}), {}, {}, nullptr, {}, {}};
  p.evaluator_spec = eval::EvaluatorSpec::from_config(cfg);
  if (p.evaluator_spec.kind != eval::EvaluatorKind::synthetic) {
    p.netlist = parse_netlist(read_required(cfg, "run", "netlist"));
  }
  p.space = problem_space(cfg, p.evaluator_spec, p.netlist);
  p.objective = opt::ObjectiveSpec::parse(read_required(cfg, "run", "objective"));
  p.evaluator = eval::make_evaluator(p.evaluator_spec);
  eval::check_metrics(*p.evaluator, p.objective);
  p.evaluator->check_space(p.space);

  opt::OptimizerConfig oc;
  oc.stop_on_pass = true;
  for (const auto& k : cfg.keys("optimizer")) oc.set(k, *cfg.get("optimizer", k));
  oc.validate();
  p.optimizer = oc;
  p.seeds = config::parse_seed_list(cfg.get_or("run", "seeds", "1-10"));
  return p;
}

relations::RelationSet load_relations(const config::Config& cfg, const Problem& problem) {
  const auto rels = relations::parse_relations(read_required(cfg, "run", "relations"));
  if (problem.netlist) {
    const auto v = relations::validate(rels, *problem.netlist);
    if (!v.rejected.empty()) {
      std::vector<std::string> why;
      for (const auto& r : v.rejected) why.push_back(relations::to_record(r.relation) + ": " + r.reason);
      throw ConfigError("relation file rejected:\n  " + text::join(why, "\n  "));
    }
  }
  return relations::normalize(rels);
}

space::PrunedSpace make_space(const config::Config& cfg, const Problem& problem, Arm arm) {
  if (arm == Arm::unconstrained) return space::unpruned(problem.space);
  return space::prune(problem.space, load_relations(cfg, problem));
}

std::filesystem::path next_run_dir(const std::filesystem::path& out, const std::string& command) {
  const auto base = out / command;
  std::filesystem::create_directories(base);
  for (int i = 1;; ++i) {
    const auto dir = base / fmt::format("run-{:04d}", i);
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

OptimizeOutcome cmd_optimize(const config::Config& cfg, const std::vector<Arm>& arms, std::ostream& log) {
  const auto problem = load_problem(cfg);
  OptimizeOutcome outcome;
  std::map<Arm, space::PrunedSpace> spaces;
  for (auto arm : arms) spaces.emplace(arm, make_space(cfg, problem, arm));

  outcome.dir = next_run_dir(cfg.get_or("run", "output", "runs"), "optimize");
  write_new(outcome.dir / "config.ini", cfg.to_text());
  write_new(outcome.dir / "optimizer.txt", problem.optimizer.to_text());
  const std::size_t jobs = std::max<std::size_t>(cfg.get_size("run", "jobs", 1), 1);
  std::string timing = "arm\tseed\twall_seconds\n";

  for (auto arm : arms) {
    const auto& ps = spaces.at(arm);
    const auto arm_dir = outcome.dir / ("arm-" + to_string(arm));
    std::filesystem::create_directories(arm_dir);
    write_new(arm_dir / "space.txt", ps.report());
    log << fmt::format("arm {}: {} free of {} parameters, {} seeds\n", to_string(arm), ps.dim(), ps.full().dim(),
                       problem.seeds.size());

    std::vector<opt::RunRecord> runs(problem.seeds.size());
    std::vector<std::exception_ptr> errors(problem.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < problem.seeds.size(); i = next++) {
        try {
          auto oc = problem.optimizer;
          oc.seed = problem.seeds[i];
          runs[i] = opt::run(ps, *problem.evaluator, problem.objective, oc);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < std::min(jobs, problem.seeds.size()); ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    std::string summary = opt::summary_header() + "\n";
    for (const auto& r : runs) {
      write_new(arm_dir / fmt::format("seed-{}.history.tsv", r.seed), opt::history_log(r, problem.objective.names()));
      summary += opt::summary_line(r) + "\n";
      timing += fmt::format("{}\t{}\t{:.6f}\n", to_string(arm), r.seed, r.wall_time);
      log << fmt::format("  seed {}: {} evaluations, best fom {}, {}\n", r.seed, r.history.size(),
                         r.best().result.fom,
                         r.passed() ? fmt::format("passed after {} evaluations", *r.evaluations_to_pass) : "not passed");
    }
    write_new(arm_dir / "summary.tsv", summary);
    outcome.runs[arm] = std::move(runs);
  }
  write_new(outcome.dir / "timing.tsv", timing);
  return outcome;
}

std::string cmd_prune(const config::Config& cfg, Arm arm) {
  const auto problem = load_problem(cfg);
  return make_space(cfg, problem, arm).report();
}

opt::Comparison cmd_compare(const std::filesystem::path& summary_a, const std::filesystem::path& summary_b,
                            const std::string& label_a, const std::string& label_b, std::ostream& out) {
  const auto a = opt::parse_summaries(text::read_file(summary_a.string()));
  const auto b = opt::parse_summaries(text::read_file(summary_b.string()));
  if (a.size() != b.size()) {
    out << fmt::format("warning: arms have different run counts ({} vs {})\n", a.size(), b.size());
  }
  const auto c = opt::compare_runs(a, b, label_a, label_b);
  out << opt::comparison_table(c);
  return c;
}

ExtractOutcome cmd_extract(const config::Config& cfg, std::size_t attempts, std::ostream& log) {
  if (attempts < 1) throw ConfigError("attempts must be >= 1");
  const auto netlist = parse_netlist(read_required(cfg, "run", "netlist"));
  const auto paper = read_required(cfg, "run", "paper");
  const auto motifs = topology::detect_motifs(netlist);

  std::shared_ptr<agents::ChatBackend> backend;
  const auto kind = text::to_lower(cfg.get_or("agents", "backend", "scripted"));
  if (kind == "scripted") {
    backend = std::make_shared<agents::ScriptedBackend>(agents::ScriptedBackend::parse(read_required(cfg, "agents", "fixture")));
  } else if (kind == "http") {
    agents::HttpBackendConfig hc;
    hc.base_url = cfg.require("agents", "base_url");
    hc.model = cfg.require("agents", "model");
    hc.api_key_env = cfg.get_or("agents", "api_key_env", hc.api_key_env);
    hc.supports_temperature = cfg.get_bool("agents", "supports_temperature", true);
    hc.max_attempts = cfg.get_size("agents", "max_attempts", 3);
    hc.initial_backoff_seconds = cfg.get_double("agents", "backoff", 1.0);
    hc.timeout_seconds = cfg.get_double("agents", "timeout", 120.0);
    backend = std::make_shared<agents::HttpBackend>(hc);
  } else {
    throw ConfigError("unknown agents.backend '" + kind + "'");
  }

  agents::ExtractionJob job;
  job.paper_text = paper;
  job.netlist = netlist;
  job.motifs = motifs;
  job.rounds = cfg.get_size("agents", "rounds", 5);
  job.agreement_margin = static_cast<int>(cfg.get_size("agents", "margin", 1));
  job.seed = cfg.get_size("agents", "seed", 0);
  if (auto dir = cfg.path("agents", "prompts")) job.prompts = agents::Prompts::load(*dir);
  const std::size_t employees = cfg.get_size("agents", "employees", 3);
  const double temperature = cfg.get_double("agents", "temperature", 0.5);
  job.team.push_back({cfg.get_or("agents", "expert_name", "ExpertAgent"), agents::Role::expert, backend, std::nullopt});
  for (std::size_t i = 0; i < employees; ++i) {
    job.team.push_back({fmt::format("Employee{}", static_cast<char>('A' + i)), agents::Role::employee, backend,
                        std::optional<double>(temperature)});
  }

  ExtractOutcome outcome;
  outcome.dir = next_run_dir(cfg.get_or("run", "output", "runs"), "extract");
  write_new(outcome.dir / "config.ini", cfg.to_text());
  write_new(outcome.dir / "motifs.txt", topology::serialize_annotations(motifs));
  for (std::size_t a = 1; a <= attempts; ++a) {
    job.attempt = a;
    const auto dir = attempts == 1 ? outcome.dir : outcome.dir / fmt::format("attempt-{}", a);
    std::filesystem::create_directories(dir);
    const auto res = agents::run_extraction(job, (dir / "transcript.jsonl").string());
    write_new(dir / "relations.txt", relations::to_text(res.summary.accepted));
    std::string rejected;
    for (const auto& r : res.summary.rejected) rejected += relations::to_record(r.relation) + "  # " + r.reason + "\n";
    write_new(dir / "rejected.txt", rejected);
    write_new(dir / "count.txt", fmt::format("{}\n", res.valid_relation_count));
    for (const auto& s : res.skipped) log << "skipped: " << s << "\n";
    log << fmt::format("attempt {}: {} valid relations\n", a, res.valid_relation_count);
    outcome.counts.push_back(res.valid_relation_count);
    outcome.sets.push_back(res.summary.set);
  }
  if (attempts > 1) {
    std::vector<int> row;
    for (auto c : outcome.counts) row.push_back(static_cast<int>(c));
    outcome.max_variation = relations::stability_report({row}).front();
    std::string report = "attempt\tcount\n";
    for (std::size_t a = 0; a < row.size(); ++a) report += fmt::format("{}\t{}\n", a + 1, row[a]);
    report += fmt::format("max_variation\t{}\n", outcome.max_variation);
    write_new(outcome.dir / "stability.tsv", report);
    log << fmt::format("max variation across {} attempts: {}\n", attempts, outcome.max_variation);
  }
  return outcome;
}

opt::Comparison cmd_bench(const config::Config& cfg, std::ostream& log) {
  const auto out = cmd_optimize(cfg, {Arm::constrained, Arm::unconstrained}, log);
  const auto& a = out.runs.at(Arm::constrained);
  const auto& b = out.runs.at(Arm::unconstrained);
  const auto c = opt::compare_runs(a, b, "constrained", "unconstrained");
  const auto table = opt::comparison_table(c);
  write_new(out.dir / "report.txt", table);
  std::string curves = "# arm constrained\n" + opt::incumbent_curves(a) + "\n# arm unconstrained\n" + opt::incumbent_curves(b);
  write_new(out.dir / "curves.tsv", curves);
  log << table << "outputs: " << out.dir.string() << "\n";
  return c;
}

}  // namespace sizekit::pipeline
