#include "qkin/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <thread>

namespace qkin {

using nlohmann::json;

namespace {

constexpr double kInvE = 0.36787944117144233;

Mat json_to_matrix(const json& j, long rows, long cols, const std::string& name,
                   std::vector<std::string>& errors) {
  Mat out = Mat::Zero(rows, cols);
  if (!j.is_array() || static_cast<long>(j.size()) != rows) {
    errors.push_back(name + ": expected " + std::to_string(rows) + " rows");
    return out;
  }
  for (long r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<long>(row.size()) != cols) {
      errors.push_back(name + ": row " + std::to_string(r) + " needs " +
                       std::to_string(cols) + " entries");
      return out;
    }
    for (long c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (e.is_number()) {
        out(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() &&
                 e[1].is_number()) {
        out(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        errors.push_back(name + ": entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ") must be a number or [re, im]");
        return out;
      }
    }
  }
  return out;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

double get_number(const json& block, const char* key, double fallback) {
  if (block.contains(key)) return block[key].get<double>();
  return fallback;
}

// Deterministic fixtures drawn from the config seed.
struct FixturePool {
  std::mt19937_64 rng;
  json dump = json::object();

  explicit FixturePool(std::uint64_t seed) : rng(seed) {}

  Mat hermitian(const std::string& name, long n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat a(n, n);
    for (long r = 0; r < n; ++r)
      for (long c = 0; c < n; ++c) a(r, c) = Complex(dist(rng), dist(rng));
    Mat h = scale * 0.5 * (a + a.adjoint());
    dump[name] = matrix_to_json(h);
    return h;
  }

  Mat state(const std::string& name, long n, double lambda) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat a(n, n);
    for (long r = 0; r < n; ++r)
      for (long c = 0; c < n; ++c) a(r, c) = Complex(dist(rng), dist(rng));
    Mat f = a * a.adjoint();
    f *= lambda / f.trace().real();
    dump[name] = matrix_to_json(f);
    return f;
  }

  NBodyOperator observable(const std::string& name, int dim, int particles,
                           double scale = 1.0) {
    NBodyOperator op;
    op.dim = dim;
    op.particles = particles;
    op.mat = hermitian(name, ipow(dim, particles), scale);
    NBodyOperator sym = symmetrize(op);
    dump[name] = matrix_to_json(sym.mat);
    return sym;
  }

  ObservableSequence sequence(const std::string& name, int dim, int truncation) {
    ObservableSequence g = ObservableSequence::zero(dim, truncation);
    for (int s = 1; s <= truncation; ++s)
      g.entries[s] = observable(name + "_s" + std::to_string(s), dim, s);
    return g;
  }
};

struct CheckList {
  double tol_scale = 1.0;
  std::vector<CheckRecord> checks;

  void add(const std::string& name, double value, double tolerance,
           double tail = std::numeric_limits<double>::quiet_NaN()) {
    CheckRecord rec;
    rec.name = name;
    rec.value = value;
    rec.tolerance = tolerance * tol_scale;
    rec.tail = tail;
    rec.pass = value <= rec.tolerance;
    checks.push_back(std::move(rec));
  }
};

// Ordered fan-out over independent points; results land in input order.
template <typename T, typename Fn>
std::vector<T> parallel_map(int jobs, int count, Fn&& fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      out[i] = fn(i);
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, count); ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace

ParticleModel builtin_model(int dim, double epsilon) {
  ParticleModel m;
  m.dim = dim;
  m.epsilon = epsilon;
  m.kinetic = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    m.kinetic(a, a) = 0.3 * a - 0.15 * (dim - 1);
    if (a + 1 < dim) {
      m.kinetic(a, a + 1) = 0.2;
      m.kinetic(a + 1, a) = 0.2;
    }
  }
  Mat hop = Mat::Zero(dim, dim);
  Mat ramp = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    ramp(a, a) = (dim == 1) ? 1.0 : 2.0 * a / (dim - 1) - 1.0;
    if (a + 1 < dim) {
      hop(a, a + 1) = 1.0;
      hop(a + 1, a) = 1.0;
    }
  }
  m.pair_potential = 0.5 * kron(hop, hop) + 0.25 * kron(ramp, ramp);
  return m;
}

Grid1D ExperimentConfig::make_grid() const { return make_grid(grid_points); }

Grid1D ExperimentConfig::make_grid(int points) const {
  const double dq = grid_spacing * grid_points / points;  // keep the length
  if (kernel_type == "zero") return Grid1D::zero(points, dq);
  if (kernel_type == "dirac") return Grid1D::dirac(points, dq);
  const double a = kernel_amplitude;
  const double w = kernel_width;
  return Grid1D::with_function(points, dq,
                               [a, w](double r) { return a * std::exp(-(r * r) / (w * w)); });
}

ParseResult parse_config_json(const json& j) {
  ParseResult result;
  std::vector<std::string>& errors = result.errors;
  ExperimentConfig cfg;

  const json model = j.value("model", json::object());
  const int d = model.contains("d") ? model["d"].get<int>() : 2;
  if (d < 1) errors.push_back("model.d must be >= 1");
  const double epsilon = get_number(model, "epsilon", 1.0);
  cfg.model = builtin_model(std::max(d, 1), epsilon);
  if (model.contains("K"))
    cfg.model.kinetic = json_to_matrix(model["K"], d, d, "model.K", errors);
  if (model.contains("Phi"))
    cfg.model.pair_potential = json_to_matrix(model["Phi"], static_cast<long>(d) * d,
                                              static_cast<long>(d) * d, "model.Phi",
                                              errors);
  if (errors.empty())
    for (const std::string& bad : cfg.model.validate())
      errors.push_back("model: " + bad);

  const json trunc = j.value("truncation", json::object());
  cfg.truncation = static_cast<int>(get_number(trunc, "S", cfg.truncation));
  cfg.series_cap = static_cast<int>(get_number(trunc, "series_cap", cfg.series_cap));
  cfg.n_max = static_cast<int>(get_number(trunc, "n_max", cfg.n_max));
  cfg.s_max = static_cast<int>(get_number(trunc, "s_max", cfg.s_max));
  cfg.lambda = get_number(trunc, "lambda", cfg.lambda);
  if (cfg.truncation < 1 || cfg.truncation > 6)
    errors.push_back("truncation.S must lie in 1..6");
  if (cfg.series_cap < 0 || cfg.series_cap > 5)
    errors.push_back("truncation.series_cap must lie in 0..5");
  if (cfg.n_max < 0 || cfg.n_max > 2)
    errors.push_back("truncation.n_max must lie in 0..2");
  if (cfg.s_max < 1 || cfg.s_max > 6)
    errors.push_back("truncation.s_max must lie in 1..6");
  if (!(cfg.lambda > 0.0 && cfg.lambda < kInvE))
    errors.push_back(
        "truncation.lambda must lie in (0, 1/e); the expansions converge only "
        "below 1/e = 0.36787944117144233");

  const json time = j.value("time", json::object());
  cfg.t = get_number(time, "t", cfg.t);
  cfg.dt = get_number(time, "dt", cfg.dt);
  if (time.contains("t_list")) {
    cfg.t_list.clear();
    for (const json& v : time["t_list"]) cfg.t_list.push_back(v.get<double>());
  }
  if (!(cfg.dt > 0.0)) errors.push_back("time.dt must be positive");
  for (std::size_t k = 0; k < cfg.t_list.size(); ++k)
    if (!(cfg.t_list[k] > 0.0) ||
        (k > 0 && !(cfg.t_list[k] < cfg.t_list[k - 1]))) {
      errors.push_back("time.t_list must be positive and strictly decreasing");
      break;
    }

  const json quad = j.value("quadrature", json::object());
  cfg.quad_nodes = static_cast<int>(get_number(quad, "nodes", cfg.quad_nodes));
  cfg.quad_depth = static_cast<int>(get_number(quad, "depth", cfg.quad_depth));
  cfg.cheb_points = static_cast<int>(get_number(quad, "cheb_points", cfg.cheb_points));
  if (cfg.quad_nodes < 2) errors.push_back("quadrature.nodes must be >= 2");
  if (cfg.quad_depth < 0 || cfg.quad_depth > 3)
    errors.push_back("quadrature.depth must lie in 0..3");
  if (cfg.cheb_points < 8) errors.push_back("quadrature.cheb_points must be >= 8");

  if (j.contains("epsilon_sweep")) {
    cfg.epsilon_sweep.clear();
    for (const json& v : j["epsilon_sweep"]) cfg.epsilon_sweep.push_back(v.get<double>());
  }
  for (std::size_t k = 0; k < cfg.epsilon_sweep.size(); ++k) {
    if (cfg.epsilon_sweep[k] <= 0.0)
      errors.push_back("epsilon_sweep entries must be positive");
    if (k > 0 && cfg.epsilon_sweep[k] >= cfg.epsilon_sweep[k - 1]) {
      errors.push_back("epsilon_sweep must decrease strictly");
      break;
    }
  }

  const json grid = j.value("grid", json::object());
  cfg.grid_points = static_cast<int>(get_number(grid, "M", cfg.grid_points));
  cfg.grid_spacing = get_number(grid, "dq", cfg.grid_spacing);
  if (grid.contains("kernel")) {
    const json kernel = grid["kernel"];
    cfg.kernel_type = kernel.value("type", cfg.kernel_type);
    cfg.kernel_amplitude = get_number(kernel, "amplitude", cfg.kernel_amplitude);
    cfg.kernel_width = get_number(kernel, "width", cfg.kernel_width);
  }
  if (cfg.grid_points < 8) errors.push_back("grid.M must be >= 8");
  if (!(cfg.grid_spacing > 0.0)) errors.push_back("grid.dq must be positive");
  if (cfg.kernel_type != "zero" && cfg.kernel_type != "dirac" &&
      cfg.kernel_type != "gaussian")
    errors.push_back("grid.kernel.type must be zero, dirac or gaussian");
  if (cfg.kernel_type == "gaussian" && !(cfg.kernel_width > 0.0))
    errors.push_back("grid.kernel.width must be positive");

  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) cfg.output_dir = j["output"].get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  if (cfg.jobs < 1) errors.push_back("jobs must be >= 1");
  if (j.contains("tol_scale")) cfg.tol_scale = j["tol_scale"].get<double>();
  if (!(cfg.tol_scale > 0.0)) errors.push_back("tol_scale must be positive");

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

ParseResult parse_config(const std::string& path) {
  ParseResult result;
  std::ifstream file(path);
  if (!file) {
    result.errors.push_back("cannot open config file " + path);
    return result;
  }
  json j;
  try {
    j = json::parse(file);
  } catch (const json::parse_error& err) {
    result.errors.push_back(std::string("config parse error: ") + err.what());
    return result;
  }
  return parse_config_json(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = {{"d", cfg.model.dim},
                {"epsilon", cfg.model.epsilon},
                {"K", matrix_to_json(cfg.model.kinetic)},
                {"Phi", matrix_to_json(cfg.model.pair_potential)}};
  j["truncation"] = {{"S", cfg.truncation},
                     {"series_cap", cfg.series_cap},
                     {"n_max", cfg.n_max},
                     {"s_max", cfg.s_max},
                     {"lambda", cfg.lambda}};
  j["time"] = {{"t", cfg.t}, {"dt", cfg.dt}, {"t_list", cfg.t_list}};
  j["quadrature"] = {{"nodes", cfg.quad_nodes},
                     {"depth", cfg.quad_depth},
                     {"cheb_points", cfg.cheb_points}};
  j["epsilon_sweep"] = cfg.epsilon_sweep;
  j["grid"] = {{"M", cfg.grid_points},
               {"dq", cfg.grid_spacing},
               {"kernel",
                {{"type", cfg.kernel_type},
                 {"amplitude", cfg.kernel_amplitude},
                 {"width", cfg.kernel_width}}}};
  j["seed"] = cfg.seed;
  j["output"] = cfg.output_dir;
  j["jobs"] = cfg.jobs;
  j["tol_scale"] = cfg.tol_scale;
  return j;
}

std::string format_field(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void run_verify(const ExperimentConfig& cfg, FixturePool& pool, CheckList& out) {
  const ParticleModel& m = cfg.model;
  const int d = m.dim;
  HamiltonianSet H(m, 3);
  FreeFlow flow(m);

  out.add("model_violations", static_cast<double>(m.validate().size()), 0.0);

  {  // Hamiltonian reassembly at three particles.
    NBodyOperator k1{d, 1, m.kinetic};
    NBodyOperator phi{d, 2, m.pair_potential};
    Mat expect = Mat::Zero(ipow(d, 3), ipow(d, 3));
    for (int i = 0; i < 3; ++i) expect += embed(k1, {i}, 3).mat;
    for (int i = 0; i < 3; ++i)
      for (int jx = i + 1; jx < 3; ++jx)
        expect += m.epsilon * embed(phi, {i, jx}, 3).mat;
    out.add("hamiltonian_reassembly", max_abs(H.hamiltonian(3) - expect), 1e-12);
  }

  const NBodyOperator g2 = pool.observable("verify_g2", d, 2);
  {  // Group law, isometry, adjointness.
    const NBodyOperator a = H.heisenberg(0.9, H.heisenberg(0.4, g2));
    const NBodyOperator b = H.heisenberg(1.3, g2);
    out.add("group_law", operator_norm(a.mat - b.mat), 1e-10);
    out.add("group_isometry",
            std::abs(operator_norm(b.mat) - operator_norm(g2.mat)), 1e-10);
    const NBodyOperator f2{d, 2, pool.state("verify_f2", ipow(d, 2), 0.9)};
    const Complex lhs = (H.heisenberg(0.8, g2).mat * f2.mat).trace();
    const Complex rhs = (g2.mat * H.schrodinger(0.8, f2).mat).trace();
    out.add("group_adjointness", std::abs(lhs - rhs), 1e-11);
  }

  {  // Cumulant degeneracies.
    HamiltonianSet Hbig(m, 4);
    HamiltonianSet Hfree(ParticleModel{d, m.kinetic,
                                       Mat::Zero(ipow(d, 2), ipow(d, 2)),
                                       m.epsilon},
                         4);
    double worst_zero = 0.0, worst_free = 0.0;
    for (int n = 1; n <= 3; ++n) {
      std::vector<int> singles;
      for (int k = 1; k <= n; ++k) singles.push_back(k);
      const NBodyOperator target =
          pool.observable("verify_cumulant_n" + std::to_string(n), d, n + 1);
      CumulantSpec at_zero{0.0, GroupDirection::forward, std::vector<int>{0},
                           singles, n + 1};
      worst_zero = std::max(worst_zero,
                            max_abs(apply_cumulant(Hbig, at_zero, target).mat));
      CumulantSpec free_spec{0.7, GroupDirection::forward, std::vector<int>{0},
                             singles, n + 1};
      worst_free = std::max(worst_free,
                            max_abs(apply_cumulant(Hfree, free_spec, target).mat));
    }
    out.add("cumulant_zero_time", worst_zero, 1e-12);
    out.add("cumulant_free_interaction", worst_free, 1e-11);
  }

  {  // Partition weights cancel.
    double worst = 0.0;
    for (int size = 2; size <= 5; ++size) {
      std::vector<ClusterElement> ground;
      for (int k = 0; k < size; ++k) ground.push_back(ClusterElement::single(k));
      long long sum = 0;
      for (const Partition& p : enumerate_partitions(ground)) sum += p.signed_weight;
      worst = std::max(worst, static_cast<double>(std::llabs(sum)));
    }
    out.add("partition_weight_cancellation", worst, 0.0);
  }

  {  // Embed then trace the padding.
    const NBodyOperator padded = embed(g2, {0, 2}, 3);
    const NBodyOperator back = partial_trace(padded, {0, 2});
    out.add("embed_trace_identity", max_abs(back.mat - d * g2.mat), 1e-12);
  }

  {  // Expansion against the hierarchy oracle.
    const ObservableSequence G0 = pool.sequence("verify_G0", d, 3);
    const ObservableSequence a = evolve_expansion(H, G0, cfg.t);
    const ObservableSequence b = evolve_ode_oracle(H, G0, cfg.t, 1e-12);
    double worst = 0.0;
    for (int s = 1; s <= 3; ++s)
      worst = std::max(worst, operator_norm(a.entries[s].mat - b.entries[s].mat));
    out.add("expansion_vs_oracle", worst, 1e-8);

    const BoundReport bound = verify_bound(H, G0, cfg.t, 0.1);
    out.add("weighted_norm_bound", bound.ratio, bound.bound);
  }

  {  // Small-time generator probes along the configured time list.
    const auto probe = generator_probe(
        H, cfg.t_list, pool.observable("verify_probe1", d, 1),
        pool.observable("verify_probe2", d, 2),
        pool.observable("verify_probe3", d, 3));
    double worst = 0.0;
    for (std::size_t k = 1; k < cfg.t_list.size(); ++k) {
      worst = std::max(worst,
                       std::abs(probe.residual1[k - 1] / probe.residual1[k] - 2.0));
      worst = std::max(worst,
                       std::abs(probe.residual2[k - 1] / probe.residual2[k] - 2.0));
    }
    out.add("generator_probe_halving", worst, 0.3);
    out.add("generator_probe_third_order", 0.8 - probe.order3, 0.0);
  }

  {  // Interaction-insertion integral identity at one insertion.
    const NBodyOperator g1 = pool.observable("verify_g1", d, 1);
    CumulantSpec spec{cfg.t, GroupDirection::forward, std::vector<int>{0}, {1}, 2};
    const Mat lhs = forward_cumulant(H, spec, g1).mat;
    const NBodyOperator embedded = embed(g1, {0}, 2);
    SimplexQuadrature quad(cfg.quad_nodes, 1);
    const Mat rhs =
        m.epsilon * quad.integrate(1, cfg.t, [&](const std::vector<double>& ts) {
          NBodyOperator inner = flow.heisenberg(ts[0], embedded);
          inner = liouvillian_int(m, 0, 1, inner);
          return H.heisenberg(cfg.t - ts[0], inner).mat;
        });
    out.add("duhamel_first_insertion", max_abs(lhs - rhs), 1e-8);
  }
}

TableFile run_meanfield(const ExperimentConfig& cfg, FixturePool& pool,
                        CheckList& out) {
  const int S = std::min(cfg.truncation, 3);
  const ObservableSequence g0 = pool.sequence("meanfield_g0", cfg.model.dim, S);

  // Shared limit evolution, then one sweep point per epsilon.
  const auto point_records = parallel_map<std::vector<ConvergenceRecord>>(
      cfg.jobs, static_cast<int>(cfg.epsilon_sweep.size()), [&](int k) {
        return meanfield_convergence(cfg.model, g0, {cfg.epsilon_sweep[k]},
                                     cfg.t);
      });

  TableFile table;
  table.name = "convergence.csv";
  table.header = "epsilon,s,t,error_opnorm,empirical_order";
  std::map<int, std::vector<double>> errors_by_s;
  for (std::size_t k = 0; k < point_records.size(); ++k)
    for (const ConvergenceRecord& rec : point_records[k])
      errors_by_s[rec.s].push_back(rec.error);

  for (std::size_t k = 0; k < point_records.size(); ++k)
    for (const ConvergenceRecord& rec : point_records[k]) {
      double order = std::numeric_limits<double>::quiet_NaN();
      if (k > 0) {
        const double prev = errors_by_s[rec.s][k - 1];
        if (prev > 0.0 && rec.error > 0.0)
          order = std::log(prev / rec.error) /
                  std::log(cfg.epsilon_sweep[k - 1] / cfg.epsilon_sweep[k]);
      }
      table.rows.push_back(format_field(rec.epsilon) + "," +
                           std::to_string(rec.s) + "," + format_field(rec.t) +
                           "," + format_field(rec.error) + "," +
                           format_field(order));
    }

  int violations = 0;
  for (auto& [s, errs] : errors_by_s) {
    if (s < 2) continue;  // one-particle entries converge trivially
    for (std::size_t k = 1; k < errs.size(); ++k)
      if (!(errs[k] < errs[k - 1])) ++violations;
  }
  out.add("meanfield_error_monotone", static_cast<double>(violations), 0.0);

  {  // Group factorization along the same sweep.
    const NBodyOperator g = pool.observable("meanfield_gfac", cfg.model.dim, 2);
    const auto recs =
        group_factorization_check(cfg.model, 2, cfg.t, cfg.epsilon_sweep, g);
    int bad = 0;
    for (std::size_t k = 1; k < recs.size(); ++k)
      if (!(recs[k].deviation < recs[k - 1].deviation)) ++bad;
    out.add("group_factorization_monotone", static_cast<double>(bad), 0.0);
  }
  return table;
}

TableFile run_chaos(const ExperimentConfig& cfg, FixturePool& pool,
                    CheckList& out) {
  const int d = cfg.model.dim;
  const Mat f0 = pool.state("chaos_f0", d, cfg.lambda);
  const NBodyOperator g1 = pool.observable("chaos_g1", d, 1);
  const NBodyOperator g2 = pool.observable("chaos_g2", d, 2);

  const auto reports = parallel_map<ChaosReport>(cfg.jobs, 2, [&](int i) {
    const int k = i + 1;
    return chaos_equality(cfg.model, k, k == 1 ? g1 : g2, f0, cfg.t,
                          cfg.truncation);
  });

  {  // Kinetic solver cross-check feeding the right-hand sides above.
    const double radius = vlasov_series_radius(cfg.model, f0);
    const double t = std::min(cfg.t, 0.5 * radius);
    const auto series =
        vlasov_solve_series(cfg.model, f0, t, 6, cfg.cheb_points);
    const Mat ode = vlasov_solve_ode(cfg.model, f0, t, 1e-12);
    out.add("kinetic_series_vs_ode", operator_norm(series.f - ode), 1e-6);
  }

  TableFile table;
  table.name = "chaos.csv";
  table.header = "k,t,s_max,lhs,rhs,abs_err,tail_estimate";
  for (int i = 0; i < 2; ++i) {
    const ChaosReport& rep = reports[i];
    table.rows.push_back(std::to_string(i + 1) + "," + format_field(cfg.t) +
                         "," + std::to_string(cfg.truncation) + "," +
                         format_field(rep.lhs) + "," + format_field(rep.rhs) +
                         "," + format_field(rep.abs_err) + "," +
                         format_field(rep.tail_estimate));
    out.add("chaos_equality_k" + std::to_string(i + 1), rep.abs_err,
            10.0 * rep.tail_estimate);
    out.add("chaos_tail_decay_k" + std::to_string(i + 1),
            rep.tail_decaying ? 0.0 : 1.0, 0.0);
  }
  return table;
}

TableFile run_gke_duality(const ExperimentConfig& cfg, FixturePool& pool,
                          CheckList& out) {
  const int d = cfg.model.dim;
  FunctionalTruncation trunc;
  trunc.n_max = cfg.n_max;
  trunc.s_max = cfg.s_max;
  trunc.series_cap = cfg.series_cap;
  trunc.lambda = cfg.lambda;

  const int cache = std::max(cfg.series_cap + 1,
                             std::max(cfg.s_max + cfg.n_max, cfg.truncation));
  HamiltonianSet H(cfg.model, cache);

  const Mat f0 = pool.state("gke_f0", d, cfg.lambda);
  const NBodyOperator g1 = pool.observable("gke_g1", d, 1);

  TableFile table;
  table.name = "records.csv";
  table.header = "name,value,tolerance,tail,pass";

  {
    ObservableSequence G0 = ObservableSequence::zero(d, cfg.s_max);
    G0.entries[1] = g1;
    const DualityReport rep = duality_check(H, G0, f0, cfg.t, trunc);
    out.add("duality_additive", rep.abs_err,
            10.0 * (rep.lhs_tail + rep.rhs_tail), rep.lhs_tail + rep.rhs_tail);
  }
  {
    double worst = 0.0;
    for (const double gap : additive_term_match(H, g1, f0, cfg.t, 4))
      worst = std::max(worst, gap);
    out.add("duality_term_match", worst, 1e-9);
  }
  {
    double worst = 0.0;
    for (int s = 1; s <= 2; ++s)
      for (int n = 0; n <= 2; ++n)
        worst = std::max(worst, cluster_expansion_identity(
                                    H, n, cfg.t, s, 2,
                                    cfg.seed + 17 * s + n)
                                    .max_deviation);
    out.add("cluster_expansion_identity", worst, 1e-10);
  }
  {
    const GkeResidualReport rep = gke_residual(H, f0, cfg.t, trunc);
    out.add("gke_residual_vs_tail", rep.residual,
            std::max(1e-6, 10.0 * rep.tail_estimate), rep.tail_estimate);
  }
  {
    double worst = 0.0;
    for (int s = 1; s <= 2; ++s)
      for (int n = 0; n <= 2; ++n)
        worst = std::max(worst, rational_weight_audit(s, n));
    out.add("rational_weight_audit", worst, 1e-15);
  }

  for (const CheckRecord& rec : out.checks)
    table.rows.push_back(rec.name + "," + format_field(rec.value) + "," +
                         format_field(rec.tolerance) + "," +
                         format_field(rec.tail) + "," +
                         (rec.pass ? "1" : "0"));
  return table;
}

std::vector<TableFile> run_hartree(const ExperimentConfig& cfg, CheckList& out) {
  const Grid1D grid = cfg.make_grid();
  Vec psi0(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double q = 2.0 * std::numbers::pi * i / grid.points;
    psi0(i) = 1.0 + 0.5 * std::exp(Complex(0, q)) + 0.2 * std::exp(Complex(0, -2 * q));
  }
  psi0 /= std::sqrt(psi0.squaredNorm() * grid.spacing);

  const HartreeResult run = hartree_solve(grid, psi0, cfg.t, cfg.dt);
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  for (const auto& rec : run.trace) {
    mass_drift = std::max(mass_drift, std::abs(rec.mass - run.trace[0].mass));
    energy_drift =
        std::max(energy_drift, std::abs(rec.energy - run.trace[0].energy));
  }
  out.add("hartree_mass_conservation", mass_drift, 1e-12);

  {  // Second-order accuracy: halving dt divides the drift by about four.
    const HartreeResult coarse = hartree_solve(grid, psi0, cfg.t, 2.0 * cfg.dt);
    double coarse_drift = 0.0;
    for (const auto& rec : coarse.trace)
      coarse_drift =
          std::max(coarse_drift, std::abs(rec.energy - coarse.trace[0].energy));
    const double ratio = coarse_drift / std::max(energy_drift, 1e-300);
    out.add("hartree_energy_drift_ratio", std::abs(ratio - 4.0), 1.0);
  }

  {  // Matrix-model cross-check on a reduced grid.
    const Grid1D small = cfg.make_grid(12);
    Vec psi_small(12);
    for (int i = 0; i < 12; ++i) {
      const double q = 2.0 * std::numbers::pi * i / 12;
      psi_small(i) =
          1.0 + 0.5 * std::exp(Complex(0, q)) + 0.2 * std::exp(Complex(0, -2 * q));
    }
    psi_small /= std::sqrt(psi_small.squaredNorm() * small.spacing);
    const Rank1Report rep = rank1_consistency(small, psi_small, cfg.t, cfg.dt);
    out.add("rank1_grid_vs_matrix", rep.trace_distance, 1e-6);
    out.add("rank1_purity", rep.purity_defect, 1e-8);
  }

  TableFile table;
  table.name = "hartree.csv";
  table.header = "time,mass,energy";
  for (const auto& rec : run.trace)
    table.rows.push_back(format_field(rec.time) + "," + format_field(rec.mass) +
                         "," + format_field(rec.energy));

  TableFile state;
  state.name = "psi_final.txt";
  state.header = "# q re_psi im_psi";
  for (int i = 0; i < grid.points; ++i)
    state.rows.push_back(format_field(i * grid.spacing) + " " +
                         format_field(run.psi(i).real()) + " " +
                         format_field(run.psi(i).imag()));
  return {table, state};
}

}  // namespace

SuiteReport run_suite(const ExperimentConfig& cfg, const std::string& suite) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = suite;
  report.seed = cfg.seed;
  report.config = cfg;

  FixturePool pool(cfg.seed);
  CheckList checks;
  checks.tol_scale = cfg.tol_scale;

  if (suite == "verify") {
    run_verify(cfg, pool, checks);
  } else if (suite == "meanfield") {
    report.tables.push_back(run_meanfield(cfg, pool, checks));
  } else if (suite == "chaos") {
    report.tables.push_back(run_chaos(cfg, pool, checks));
  } else if (suite == "gke-duality") {
    report.tables.push_back(run_gke_duality(cfg, pool, checks));
  } else if (suite == "hartree") {
    for (TableFile& t : run_hartree(cfg, checks))
      report.tables.push_back(std::move(t));
  } else {
    throw std::invalid_argument("run_suite: unknown suite '" + suite + "'");
  }

  report.checks = checks.checks;
  report.all_pass = true;
  for (const CheckRecord& rec : report.checks) report.all_pass &= rec.pass;
  report.fixtures = pool.dump;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

std::vector<std::string> emit_report(const SuiteReport& report,
                                     const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir))
    throw std::runtime_error("emit_report: cannot create directory " + dir);

  std::vector<std::string> written;

  json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["all_pass"] = report.all_pass;
  j["wall_seconds"] = report.wall_seconds;
  j["config"] = config_to_json(report.config);
  json checks = json::array();
  for (const CheckRecord& rec : report.checks) {
    json c;
    c["name"] = rec.name;
    c["value"] = rec.value;
    c["tolerance"] = rec.tolerance;
    if (std::isnan(rec.tail))
      c["tail"] = nullptr;
    else
      c["tail"] = rec.tail;
    c["pass"] = rec.pass;
    checks.push_back(std::move(c));
  }
  j["checks"] = checks;
  json tables = json::array();
  for (const TableFile& t : report.tables) tables.push_back(t.name);
  j["tables"] = tables;

  const std::string report_path = (fs::path(dir) / "report.json").string();
  {
    std::ofstream file(report_path);
    if (!file) throw std::runtime_error("emit_report: cannot write " + report_path);
    file << j.dump(2) << "\n";
  }
  written.push_back(report_path);

  for (const TableFile& t : report.tables) {
    const std::string path = (fs::path(dir) / t.name).string();
    std::ofstream file(path);
    if (!file) throw std::runtime_error("emit_report: cannot write " + path);
    file << t.header << "\n";
    for (const std::string& row : t.rows) file << row << "\n";
    written.push_back(path);
  }

  if (!report.fixtures.empty()) {
    const std::string path = (fs::path(dir) / "fixtures.json").string();
    std::ofstream file(path);
    if (!file) throw std::runtime_error("emit_report: cannot write " + path);
    file << report.fixtures.dump(2) << "\n";
    written.push_back(path);
  }
  return written;
}

}  // namespace qkin
