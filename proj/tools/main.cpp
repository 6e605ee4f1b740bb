#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sizekit/errors.hpp"
#include "sizekit/pipeline.hpp"
#include "sizekit/text.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct CommonOptions {
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.configs, "Config file(s); later files override earlier ones")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.overrides, "Override a setting: section.key=value (wins over config files)");
  cmd->add_option("-o,--out", o.output, "Output directory (overrides run.output)");
}

sizekit::config::Config layered(const CommonOptions& o) {
  sizekit::config::Config cfg;
  for (const auto& path : o.configs) cfg.merge(sizekit::config::Config::load(path));
  for (const auto& ov : o.overrides) cfg.set_override(ov);
  if (!o.output.empty()) cfg.set("run", "output", o.output);
  return cfg;
}

/// Stores a command-line path flag so it resolves against the working directory.
void set_path(sizekit::config::Config& cfg, const std::string& section, const std::string& key, const std::string& v) {
  if (!v.empty()) cfg.set(section, key, v, ".");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sizekit: relation-guided analog circuit sizing"};
  app.require_subcommand(1);

  CommonOptions extract_o, prune_o, optimize_o, bench_o;
  std::string netlist, paper, fixture, relations, arm = "both", prune_arm = "constrained", seeds;
  std::size_t attempts = 1;
  bool full_budget = false;

  auto* extract = app.add_subcommand("extract", "Extract sizing relations with the agent team");
  add_common(extract, extract_o);
  extract->add_option("--netlist", netlist, "Circuit netlist");
  extract->add_option("--paper", paper, "Pre-extracted paper text");
  extract->add_option("--fixture", fixture, "Scripted-backend fixture (selects the scripted backend)");
  extract->add_option("--attempts", attempts, "Independent extraction attempts (stability report when > 1)")
      ->check(CLI::PositiveNumber);

  auto* prune = app.add_subcommand("prune", "Report the pruned search space (dry run)");
  add_common(prune, prune_o);
  prune->add_option("--relations", relations, "Relation file (overrides run.relations)");
  prune->add_option("--arm", prune_arm, "constrained or unconstrained");

  auto* optimize = app.add_subcommand("optimize", "Run the optimizer on one or both arms for every seed");
  add_common(optimize, optimize_o);
  optimize->add_option("--relations", relations, "Relation file (overrides run.relations)");
  optimize->add_option("--arm", arm, "constrained, unconstrained or both");
  optimize->add_option("--seeds", seeds, "Seed list, e.g. 1-10 or 1,4,7");
  optimize->add_flag("--full-budget", full_budget, "Run every iteration even after a feasible point");

  std::string summary_a, summary_b, label_a = "constrained", label_b = "unconstrained", report;
  auto* compare = app.add_subcommand("compare", "Compare two arm summaries (Time, Pass Rate, speedup)");
  compare->add_option("summary_a", summary_a, "Summary of the arm being evaluated")->required()->check(CLI::ExistingFile);
  compare->add_option("summary_b", summary_b, "Summary of the baseline arm")->required()->check(CLI::ExistingFile);
  compare->add_option("--label-a", label_a, "Label of the first arm");
  compare->add_option("--label-b", label_b, "Label of the second arm");
  compare->add_option("--report", report, "Also write the table to this file (must not exist)");

  auto* bench = app.add_subcommand("bench", "End to end: optimize both arms, then compare");
  add_common(bench, bench_o);
  bench->add_option("--relations", relations, "Relation file (overrides run.relations)");
  bench->add_option("--seeds", seeds, "Seed list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (extract->parsed()) {
      auto cfg = layered(extract_o);
      set_path(cfg, "run", "netlist", netlist);
      set_path(cfg, "run", "paper", paper);
      if (!fixture.empty()) {
        cfg.set("agents", "backend", "scripted");
        set_path(cfg, "agents", "fixture", fixture);
      }
      const auto out = sizekit::pipeline::cmd_extract(cfg, attempts, std::cout);
      std::cout << "valid relations: ";
      for (std::size_t i = 0; i < out.counts.size(); ++i) std::cout << (i ? " " : "") << out.counts[i];
      std::cout << "\noutputs: " << out.dir.string() << "\n";
    } else if (prune->parsed()) {
      auto cfg = layered(prune_o);
      set_path(cfg, "run", "relations", relations);
      std::cout << sizekit::pipeline::cmd_prune(cfg, sizekit::pipeline::arm_from_string(prune_arm));
    } else if (optimize->parsed()) {
      auto cfg = layered(optimize_o);
      set_path(cfg, "run", "relations", relations);
      if (!seeds.empty()) cfg.set("run", "seeds", seeds);
      if (full_budget) cfg.set("optimizer", "stop_on_pass", "false");
      std::vector<sizekit::pipeline::Arm> arms;
      if (sizekit::text::iequals(arm, "both")) {
        arms = {sizekit::pipeline::Arm::constrained, sizekit::pipeline::Arm::unconstrained};
      } else {
        arms = {sizekit::pipeline::arm_from_string(arm)};
      }
      const auto out = sizekit::pipeline::cmd_optimize(cfg, arms, std::cout);
      std::cout << "outputs: " << out.dir.string() << "\n";
    } else if (compare->parsed()) {
      std::ostringstream table;
      sizekit::pipeline::cmd_compare(summary_a, summary_b, label_a, label_b, table);
      std::cout << table.str();
      if (!report.empty()) {
        if (std::filesystem::exists(report)) throw sizekit::ConfigError("refusing to overwrite " + report);
        sizekit::text::write_file(report, table.str());
      }
    } else if (bench->parsed()) {
      auto cfg = layered(bench_o);
      set_path(cfg, "run", "relations", relations);
      if (!seeds.empty()) cfg.set("run", "seeds", seeds);
      sizekit::pipeline::cmd_bench(cfg, std::cout);
    }
  } catch (const sizekit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sizekit::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sizekit::UnknownHandle& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
