#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qkin/experiment.hpp"

// Command-line driver: one subcommand per suite, JSON config in, report and
// CSV tables out. Exit code 0 only when every check passes.

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  double tol_scale = 0.0;
};

int run(const std::string& suite, const CliOptions& opt) {
  qkin::ParseResult parsed;
  if (opt.config_path.empty()) {
    parsed = qkin::parse_config_json(nlohmann::json::object());
  } else {
    parsed = qkin::parse_config(opt.config_path);
  }
  if (!parsed.config) {
    std::cerr << "config rejected:\n";
    for (const std::string& err : parsed.errors) std::cerr << "  - " << err << "\n";
    return 2;
  }
  qkin::ExperimentConfig cfg = *parsed.config;
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.jobs > 0) cfg.jobs = opt.jobs;
  if (opt.tol_scale > 0.0) cfg.tol_scale = opt.tol_scale;

  const qkin::SuiteReport report = qkin::run_suite(cfg, suite);
  const auto written = qkin::emit_report(report, cfg.output_dir);

  for (const qkin::CheckRecord& rec : report.checks)
    std::cout << (rec.pass ? "PASS " : "FAIL ") << rec.name << "  value "
              << qkin::format_field(rec.value) << "  tolerance "
              << qkin::format_field(rec.tolerance) << "\n";
  std::cout << (report.all_pass ? "OK" : "FAILED") << "  (" << report.suite
            << ", " << written.size() << " files in " << cfg.output_dir << ")\n";
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional laboratory for kinetic hierarchies of observables"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config path");
  app.add_option("--out", opt.out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "fixture seed (overrides config)");
  app.add_option("--jobs", opt.jobs, "worker count for independent points");
  app.add_option("--tol-scale", opt.tol_scale, "scale factor on check tolerances");

  const std::vector<std::string> suites{"verify", "meanfield", "chaos",
                                        "gke-duality", "hartree"};
  for (const std::string& name : suites)
    app.add_subcommand(name, "run the " + name + " suite");

  CLI11_PARSE(app, argc, argv);
  opt.seed_set = seed_opt->count() > 0;

  try {
    return run(app.get_subcommands().front()->get_name(), opt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
