#ifndef QKIN_EXPERIMENT_HPP
#define QKIN_EXPERIMENT_HPP

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "qkin/gke_functionals.hpp"
#include "qkin/kinetic_equations.hpp"

// Configuration-driven entry point: JSON configs with validated defaults,
// named verification suites producing check records and CSV tables, and
// byte-stable report emission. Identical configs reproduce identical numeric
// table fields.

namespace qkin {

struct ExperimentConfig {
  ParticleModel model;

  int truncation = 4;   // S
  int series_cap = 5;
  int n_max = 2;
  int s_max = 4;
  double lambda = 0.2;

  double t = 0.5;
  double dt = 1e-3;
  std::vector<double> t_list{1e-3, 5e-4, 2.5e-4, 1.25e-4};  // probe times

  int quad_nodes = 16;
  int quad_depth = 3;
  int cheb_points = 48;

  std::vector<double> epsilon_sweep{0.2, 0.1, 0.05, 0.025};

  int grid_points = 32;
  double grid_spacing = 0.19634954084936207;  // 2 pi / 32
  std::string kernel_type = "dirac";          // zero | dirac | gaussian
  double kernel_amplitude = 1.0;
  double kernel_width = 0.5;

  std::uint64_t seed = 20250809;
  std::string output_dir = "out";
  int jobs = 1;
  double tol_scale = 1.0;

  Grid1D make_grid() const;
  Grid1D make_grid(int points) const;
};

// Deterministic Hermitian model used when a config omits the matrices.
ParticleModel builtin_model(int dim, double epsilon);

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // every violation, not just the first
};

ParseResult parse_config(const std::string& path);
ParseResult parse_config_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  double tail = 0.0;  // NaN when not applicable
  bool pass = false;
};

struct TableFile {
  std::string name;
  std::string header;
  std::vector<std::string> rows;  // preformatted, deterministic
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  bool all_pass = false;
  double wall_seconds = 0.0;
  std::vector<CheckRecord> checks;
  std::vector<TableFile> tables;
  ExperimentConfig config;   // echoed into the report
  nlohmann::json fixtures;   // seeded matrices the suite drew
};

// suite in {verify, meanfield, chaos, gke-duality, hartree}.
SuiteReport run_suite(const ExperimentConfig& config, const std::string& suite);

// Writes report.json plus every table (CSV) and the fixture dump under dir.
// Returns the written paths.
std::vector<std::string> emit_report(const SuiteReport& report,
                                     const std::string& dir);

// %.17g formatting used for every numeric table field.
std::string format_field(double v);

}  // namespace qkin

#endif  // QKIN_EXPERIMENT_HPP
