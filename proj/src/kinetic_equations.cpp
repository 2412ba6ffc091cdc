#include "qkin/kinetic_equations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qkin/ode.hpp"

namespace qkin {

namespace {

constexpr Complex kImag{0.0, 1.0};

bool is_diagonal(const Mat& m) {
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      if (r != c && m(r, c) != Complex(0.0)) return false;
  return true;
}

// Tr_2 of -i [Phi, X] for X on two particles, keeping particle 1.
Mat traced_interaction(const ParticleModel& model, const Mat& x) {
  const int d = model.dim;
  const Mat& phi = model.pair_potential;
  Mat commutator;
  if (is_diagonal(phi)) {
    commutator = x;
    for (long r = 0; r < x.rows(); ++r)
      for (long c = 0; c < x.cols(); ++c)
        commutator(r, c) *= phi(r, r) - phi(c, c);
  } else {
    commutator = phi * x - x * phi;
  }
  Mat out = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (int c = 0; c < d; ++c) acc += commutator(a * d + c, b * d + c);
      out(a, b) = -kImag * acc;
    }
  return out;
}

}  // namespace

std::vector<std::string> OneParticleState::validate(bool physical) const {
  std::vector<std::string> bad;
  if (f.rows() != f.cols()) {
    bad.push_back("state matrix must be square");
    return bad;
  }
  if (hermiticity_defect(f) > 1e-12 * std::max(1.0, operator_norm(f)))
    bad.push_back("state not Hermitian");
  if (physical) {
    Eigen::SelfAdjointEigenSolver<Mat> es(f);
    if (es.eigenvalues().minCoeff() < -1e-12)
      bad.push_back("state has a negative eigenvalue");
  }
  return bad;
}

Mat vlasov_rhs(const ParticleModel& model, const Mat& f) {
  const Mat& k = model.kinetic;
  Mat out = -kImag * (k * f - f * k);  // -N_0 f
  out += traced_interaction(model, kron(f, f));
  return out;
}

Mat vlasov_solve_ode(const ParticleModel& model, const Mat& f0, double t,
                     double tol) {
  const int d = model.dim;
  auto rhs = [&](const Vec& y, Vec& dy, double) {
    const Mat f = Eigen::Map<const Mat>(y.data(), d, d);
    const Mat r = vlasov_rhs(model, f);
    dy = Eigen::Map<const Vec>(r.data(), d * d);
  };
  const Vec y0 = Eigen::Map<const Vec>(f0.data(), d * d);
  const Vec yt = integrate_complex_ode(rhs, y0, 0.0, t, tol);
  return Eigen::Map<const Mat>(yt.data(), d, d);
}

double vlasov_series_radius(const ParticleModel& model, const Mat& f0) {
  const double phi_norm = operator_norm(model.pair_potential);
  const double f_norm = trace_norm(f0);
  if (phi_norm == 0.0 || f_norm == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * phi_norm * f_norm);
}

namespace {

// Insertion + trace: sum_m Tr_last[-i [Phi(m, last), X]] for X on `count`
// particles; the result lives on count-1 particles.
Mat insert_and_trace(const ParticleModel& model,
                     const std::vector<Mat>& phi_embedded, const Mat& x,
                     int count) {
  const int d = model.dim;
  const long out_dim = ipow(d, count - 1);
  Mat acc = Mat::Zero(out_dim, out_dim);
  NBodyOperator work{d, count, Mat()};
  for (int m = 0; m + 1 < count; ++m) {
    const Mat& phi = phi_embedded[m];
    work.mat = -kImag * (phi * x - x * phi);
    std::vector<int> keep(count - 1);
    for (int p = 0; p < count - 1; ++p) keep[p] = p;
    acc += partial_trace(work, keep).mat;
  }
  return acc;
}

}  // namespace

std::vector<Mat> kinetic_series_terms(const ParticleModel& model, const Mat& f0,
                                      int base, double t, int order,
                                      int cheb_points) {
  if (base < 1) throw std::invalid_argument("kinetic_series_terms: base < 1");
  if (order < 0) throw std::invalid_argument("kinetic_series_terms: order < 0");
  const int d = model.dim;
  const FreeFlow flow(model);

  std::vector<Mat> terms;
  terms.reserve(order + 1);

  // Order zero: free backward conjugation of every factor.
  {
    const Mat b = flow.single(-t) * f0 * flow.single(-t).adjoint();
    Mat prod = b;
    for (int p = 1; p < base; ++p) prod = kron(prod, b);
    terms.push_back(prod);
  }
  if (order == 0 || t == 0.0) {
    while (static_cast<int>(terms.size()) <= order)
      terms.push_back(Mat::Zero(terms[0].rows(), terms[0].cols()));
    return terms;
  }

  const auto nodes = ChebyshevInterpolant::sample_points(cheb_points, t);

  // Embedded pair potentials Phi(m, count-1) per particle count, reused
  // across orders and sample points.
  std::vector<std::vector<Mat>> phi_cache(base + order + 1);
  for (int count = 2; count <= base + order; ++count) {
    NBodyOperator phi{d, 2, model.pair_potential};
    for (int m = 0; m + 1 < count; ++m)
      phi_cache[count].push_back(embed(phi, {m, count - 1}, count).mat);
  }

  for (int n = 1; n <= order; ++n) {
    // Innermost stage: products of flowed factors with one traced insertion.
    ChebyshevInterpolant antiderivative = [&] {
      std::vector<Mat> samples;
      samples.reserve(nodes.size());
      for (double sigma : nodes) {
        const Mat u = flow.single(-sigma);
        const Mat b = u * f0 * u.adjoint();
        const int count = base + n;
        Mat prod = b;
        for (int p = 1; p < count; ++p) prod = kron(prod, b);
        Mat m = insert_and_trace(model, phi_cache[count], prod, count);
        const Mat back = kron_power(flow.single(sigma), count - 1);
        samples.push_back(back * m * back.adjoint());
      }
      return ChebyshevInterpolant::fit(samples, t).antiderivative();
    }();

    // Walk outward: flow forward, insert and trace the newest particle, flow
    // back, integrate. The stage-j object enters on base+j particles.
    for (int j = n - 1; j >= 1; --j) {
      const int count = base + j;
      std::vector<Mat> samples;
      samples.reserve(nodes.size());
      for (double tau : nodes) {
        const Mat fwd = kron_power(flow.single(-tau), count);
        const Mat v = fwd * antiderivative.eval(tau) * fwd.adjoint();
        Mat m = insert_and_trace(model, phi_cache[count], v, count);
        const Mat back = kron_power(flow.single(tau), count - 1);
        samples.push_back(back * m * back.adjoint());
      }
      antiderivative = ChebyshevInterpolant::fit(samples, t).antiderivative();
    }

    const Mat fwd = kron_power(flow.single(-t), base);
    terms.push_back(fwd * antiderivative.eval(t) * fwd.adjoint());
  }
  return terms;
}

VlasovSeriesResult vlasov_solve_series(const ParticleModel& model, const Mat& f0,
                                       double t, int order, int cheb_points) {
  if (order > 6)
    throw std::invalid_argument("vlasov_solve_series: order capped at 6");
  VlasovSeriesResult out;
  out.radius = vlasov_series_radius(model, f0);
  if (std::abs(t) >= out.radius) {
    std::ostringstream os;
    os << "vlasov_solve_series: |t| must stay below the convergence radius t0 = "
       << out.radius;
    throw std::invalid_argument(os.str());
  }
  const auto terms = kinetic_series_terms(model, f0, 1, t, order, cheb_points);
  out.f = Mat::Zero(model.dim, model.dim);
  for (const Mat& term : terms) {
    out.f += term;
    out.term_norms.push_back(trace_norm(term));
  }
  return out;
}

ProductFormulaReport product_formula_check(const ParticleModel& model,
                                           const Mat& f0, int k, double t,
                                           int order, int cheb_points) {
  if (k < 1 || k > 3)
    throw std::invalid_argument("product_formula_check: k must lie in 1..3");
  const auto product_terms =
      kinetic_series_terms(model, f0, k, t, order, cheb_points);
  const auto single_terms =
      kinetic_series_terms(model, f0, 1, t, order, cheb_points);

  ProductFormulaReport report;
  const long dim = product_terms[0].rows();
  Mat lhs_sum = Mat::Zero(dim, dim);
  Mat rhs_sum = Mat::Zero(dim, dim);
  for (int n = 0; n <= order; ++n) {
    // Tensor combinations of one-particle terms at total order n.
    Mat matched = Mat::Zero(dim, dim);
    std::function<void(int, int, const Mat&)> walk = [&](int slot, int left,
                                                         const Mat& acc) {
      if (slot == k - 1) {
        matched += kron(acc, single_terms[left]);
        return;
      }
      for (int take = 0; take <= left; ++take)
        walk(slot + 1, left - take, kron(acc, single_terms[take]).eval());
    };
    walk(0, n, Mat::Identity(1, 1));
    const double dev = operator_norm(product_terms[n] - matched);
    report.per_order_deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
    lhs_sum += product_terms[n];
    rhs_sum += matched;
  }
  report.partial_sum_deviation = operator_norm(lhs_sum - rhs_sum);
  return report;
}

ChaosReport chaos_equality(const ParticleModel& model, int k,
                           const NBodyOperator& g_k0, const Mat& f0, double t,
                           int s_max, double ode_tol) {
  if (g_k0.particles != k)
    throw std::invalid_argument("chaos_equality: observable must act on k particles");
  if (s_max < k)
    throw std::invalid_argument("chaos_equality: s_max below the observable order");

  ObservableSequence g0 = ObservableSequence::zero(model.dim, s_max);
  g0.entries[k] = g_k0;
  const ObservableSequence gt = limit_evolve_ode(model, g0, t, ode_tol);

  ChaosReport report;
  Mat power = Mat::Identity(1, 1);
  for (int s = 1; s <= s_max; ++s) {
    power = kron(power, f0);
    if (s < k) continue;
    const double term =
        ((gt.entries[s].mat * power).trace() / factorial(s)).real();
    report.lhs_terms.push_back(term);
    report.lhs += term;
  }
  report.tail_estimate = std::abs(report.lhs_terms.back());
  for (std::size_t i = 2; i < report.lhs_terms.size(); ++i)
    if (std::abs(report.lhs_terms[i]) > std::abs(report.lhs_terms[i - 1]))
      report.tail_decaying = false;

  const Mat f1t = vlasov_solve_ode(model, f0, t, ode_tol);
  Mat prod = Mat::Identity(1, 1);
  for (int i = 0; i < k; ++i) prod = kron(prod, f1t);
  report.rhs = ((g_k0.mat * prod).trace() / factorial(k)).real();
  report.abs_err = std::abs(report.lhs - report.rhs);
  return report;
}

Grid1D Grid1D::with_function(int points, double spacing,
                             const std::function<double(double)>& phi) {
  Grid1D g;
  g.points = points;
  g.spacing = spacing;
  g.kernel.resize(points);
  for (int j = 0; j < points; ++j) {
    const int folded = std::min(j, points - j);
    g.kernel[j] = phi(folded * spacing);
  }
  return g;
}

Grid1D Grid1D::dirac(int points, double spacing) {
  Grid1D g = zero(points, spacing);
  g.kernel[0] = 1.0 / spacing;
  return g;
}

Grid1D Grid1D::zero(int points, double spacing) {
  Grid1D g;
  g.points = points;
  g.spacing = spacing;
  g.kernel.assign(points, 0.0);
  return g;
}

Eigen::MatrixXd Grid1D::kinetic_matrix() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(points, points);
  const double w = 1.0 / (spacing * spacing);
  for (int i = 0; i < points; ++i) {
    k(i, i) = w;
    k(i, (i + 1) % points) = -0.5 * w;
    k(i, (i + points - 1) % points) = -0.5 * w;
  }
  return k;
}

std::vector<std::string> Grid1D::validate() const {
  std::vector<std::string> bad;
  if (points < 8) bad.push_back("grid needs at least 8 points");
  if (!(spacing > 0.0)) bad.push_back("spacing must be positive");
  if (static_cast<int>(kernel.size()) != points)
    bad.push_back("kernel must hold one sample per offset");
  else
    for (int j = 1; j < points; ++j)
      if (kernel[j] != kernel[points - j]) {
        bad.push_back("kernel must be even");
        break;
      }
  return bad;
}

double grid_mass(const Grid1D& grid, const Vec& psi) {
  return psi.squaredNorm() * grid.spacing;
}

double grid_energy(const Grid1D& grid, const Vec& psi) {
  const Eigen::MatrixXd k = grid.kinetic_matrix();
  double energy = (psi.adjoint() * (k * psi)).real()(0, 0) * grid.spacing;
  for (int i = 0; i < grid.points; ++i)
    for (int j = 0; j < grid.points; ++j)
      energy += 0.5 * grid.kernel_at(i, j) * std::norm(psi(i)) *
                std::norm(psi(j)) * grid.spacing * grid.spacing;
  return energy;
}

HartreeResult hartree_solve(const Grid1D& grid, const Vec& psi0, double t,
                            double dt) {
  {
    const auto bad = grid.validate();
    if (!bad.empty()) throw std::invalid_argument("hartree_solve: " + bad.front());
  }
  if (!(dt > 0.0)) throw std::invalid_argument("hartree_solve: dt must be positive");
  const long steps = std::llround(t / dt);
  if (std::abs(steps * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("hartree_solve: t must be a multiple of dt");

  HartreeResult out;
  out.psi = psi0;
  if (std::abs(grid_mass(grid, psi0) - 1.0) > 1e-8)
    out.warnings.push_back("initial state is not normalized on the grid");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(grid.kinetic_matrix());
  const Eigen::MatrixXd& basis = es.eigenvectors();
  Vec kinetic_phase(grid.points);
  for (int i = 0; i < grid.points; ++i)
    kinetic_phase(i) = std::exp(-kImag * (dt * es.eigenvalues()(i)));

  auto half_potential = [&](Vec& psi) {
    for (int i = 0; i < grid.points; ++i) {
      double v = 0.0;
      for (int j = 0; j < grid.points; ++j)
        v += grid.kernel_at(i, j) * std::norm(psi(j));
      v *= grid.spacing;
      psi(i) *= std::exp(-kImag * (0.5 * dt * v));
    }
  };

  out.trace.push_back({0.0, grid_mass(grid, out.psi), grid_energy(grid, out.psi)});
  for (long step = 1; step <= steps; ++step) {
    half_potential(out.psi);
    Vec modes = basis.transpose() * out.psi;
    modes = modes.cwiseProduct(kinetic_phase);
    out.psi = basis * modes;
    half_potential(out.psi);
    out.trace.push_back(
        {step * dt, grid_mass(grid, out.psi), grid_energy(grid, out.psi)});
  }
  return out;
}

void save_grid_state(const std::string& path, const Grid1D& grid, const Vec& psi) {
  if (psi.size() != grid.points)
    throw std::invalid_argument("save_grid_state: size mismatch");
  std::ofstream file(path);
  if (!file) throw std::runtime_error("save_grid_state: cannot open " + path);
  file << "# q re_psi im_psi\n";
  char line[128];
  for (int i = 0; i < grid.points; ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g %.17g\n", i * grid.spacing,
                  psi(i).real(), psi(i).imag());
    file << line;
  }
}

Vec load_grid_state(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("load_grid_state: cannot open " + path);
  std::vector<Complex> values;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    double q, re, im;
    if (!(is >> q >> re >> im))
      throw std::runtime_error("load_grid_state: malformed row '" + line + "'");
    values.emplace_back(re, im);
  }
  Vec psi(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) psi(i) = values[i];
  return psi;
}

ParticleModel grid_matrix_model(const Grid1D& grid) {
  ParticleModel m;
  m.dim = grid.points;
  m.epsilon = 1.0;
  m.kinetic = grid.kinetic_matrix().cast<Complex>();
  const long d2 = static_cast<long>(grid.points) * grid.points;
  m.pair_potential = Mat::Zero(d2, d2);
  for (int i = 0; i < grid.points; ++i)
    for (int j = 0; j < grid.points; ++j)
      m.pair_potential(i * grid.points + j, i * grid.points + j) =
          grid.kernel_at(i, j);
  return m;
}

Rank1Report rank1_consistency(const Grid1D& grid, const Vec& psi0, double t,
                              double dt, double ode_tol) {
  if (grid.points > 16)
    throw std::invalid_argument(
        "rank1_consistency: the matrix model is tractable only for grids up to "
        "16 points");
  const ParticleModel model = grid_matrix_model(grid);
  const Mat f0 = grid.spacing * (psi0 * psi0.adjoint());
  const Mat f_kinetic = vlasov_solve_ode(model, f0, t, ode_tol);
  const HartreeResult hartree = hartree_solve(grid, psi0, t, dt);
  const Mat f_grid = grid.spacing * (hartree.psi * hartree.psi.adjoint());

  Rank1Report report;
  report.trace_distance = 0.5 * trace_norm(f_kinetic - f_grid);
  Eigen::SelfAdjointEigenSolver<Mat> es(f_kinetic);
  Eigen::VectorXd evals = es.eigenvalues();
  std::sort(evals.data(), evals.data() + evals.size(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  report.purity_defect = evals.size() > 1 ? std::abs(evals(1)) : 0.0;
  return report;
}

}  // namespace qkin
