#ifndef QKIN_KINETIC_EQUATIONS_HPP
#define QKIN_KINETIC_EQUATIONS_HPP

#include <string>

#include "qkin/meanfield_limit.hpp"

// The self-consistent one-particle kinetic equation
//   d/dt f = -N_0(1) f + Tr_2 (-N_int(1,2)) (f (x) f),
// solved two independent ways (adaptive ODE integration and the nested
// backward-propagated series), the product formula for tensor powers of the
// solution, chaos propagation of k-particle observables, and the periodic
// one-dimensional grid solver for the pure-state reduction.

namespace qkin {

struct OneParticleState {
  Mat f;

  double trace_weight() const { return f.trace().real(); }
  // physical: eigenvalues >= -1e-12 on top of Hermiticity.
  std::vector<std::string> validate(bool physical = true) const;
};

// Right-hand side of the kinetic equation; traceless by the commutator
// structure. Diagonal pair potentials take an elementwise path, dense ones a
// full two-particle assembly; both evaluate the same contraction.
Mat vlasov_rhs(const ParticleModel& model, const Mat& f);

Mat vlasov_solve_ode(const ParticleModel& model, const Mat& f0, double t,
                     double tol = 1e-10);

// Norm-convergence radius t0 = 1 / (2 ||Phi|| ||f0||_tr).
double vlasov_series_radius(const ParticleModel& model, const Mat& f0);

// Per-order terms of the backward-propagated series for (x)^base of the
// solution: term n carries n interaction insertions and base+n initial
// factors, integrated over the ordered time simplex by Chebyshev
// antiderivative cascades. base = 1 is the kinetic series itself.
std::vector<Mat> kinetic_series_terms(const ParticleModel& model, const Mat& f0,
                                      int base, double t, int order,
                                      int cheb_points = 48);

struct VlasovSeriesResult {
  Mat f;
  std::vector<double> term_norms;  // trace norms per order
  double radius = 0.0;
};

// Requires t < t0; throws with the computed radius otherwise. order <= 6.
VlasovSeriesResult vlasov_solve_series(const ParticleModel& model, const Mat& f0,
                                       double t, int order,
                                       int cheb_points = 48);

struct ProductFormulaReport {
  std::vector<double> per_order_deviation;  // term_n vs matched tensor sums
  double max_deviation = 0.0;
  double partial_sum_deviation = 0.0;
};

// k-fold product series against tensor combinations of one-particle series
// terms at matched total order. k <= 3.
ProductFormulaReport product_formula_check(const ParticleModel& model,
                                           const Mat& f0, int k, double t,
                                           int order, int cheb_points = 48);

struct ChaosReport {
  double lhs = 0.0;   // sum_s (1/s!) Tr[g_s(t) prod f0]
  double rhs = 0.0;   // (1/k!) Tr[g_k prod f1(t)]
  double abs_err = 0.0;
  double tail_estimate = 0.0;  // magnitude of the last included term
  std::vector<double> lhs_terms;
  bool tail_decaying = true;
};

// Limit hierarchy started from a k-particle observable, paired against chaos
// data, compared with the kinetic solution.
ChaosReport chaos_equality(const ParticleModel& model, int k,
                           const NBodyOperator& g_k0, const Mat& f0, double t,
                           int s_max, double ode_tol = 1e-10);

// Periodic one-dimensional grid with an even interaction kernel sampled at
// lattice offsets. The delta kernel carries weight 1/spacing at offset zero.
struct Grid1D {
  int points = 0;
  double spacing = 0.0;
  std::vector<double> kernel;

  static Grid1D with_function(int points, double spacing,
                              const std::function<double(double)>& phi);
  static Grid1D dirac(int points, double spacing);
  static Grid1D zero(int points, double spacing);

  double kernel_at(int i, int j) const {
    return kernel[((i - j) % points + points) % points];
  }
  // -(1/2) discrete Laplacian, (1,-2,1)/spacing^2 periodic.
  Eigen::MatrixXd kinetic_matrix() const;
  std::vector<std::string> validate() const;
};

double grid_mass(const Grid1D& grid, const Vec& psi);
double grid_energy(const Grid1D& grid, const Vec& psi);

struct HartreeStepRecord {
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
};

struct HartreeResult {
  Vec psi;
  std::vector<HartreeStepRecord> trace;  // per step, including t = 0
  std::vector<std::string> warnings;
};

// Strang splitting: half potential phase, exact kinetic step in the Laplacian
// eigenbasis, half potential phase. t must be an integer multiple of dt.
HartreeResult hartree_solve(const Grid1D& grid, const Vec& psi0, double t,
                            double dt);

void save_grid_state(const std::string& path, const Grid1D& grid, const Vec& psi);
Vec load_grid_state(const std::string& path);

// Matrix model whose kinetic part is the grid Laplacian and whose pair
// potential multiplies by the kernel; the kinetic equation for
// spacing * |psi><psi| then coincides with the grid dynamics.
ParticleModel grid_matrix_model(const Grid1D& grid);

struct Rank1Report {
  double trace_distance = 0.0;
  double purity_defect = 0.0;  // second eigenvalue of the evolved state
};

Rank1Report rank1_consistency(const Grid1D& grid, const Vec& psi0, double t,
                              double dt, double ode_tol = 1e-10);

}  // namespace qkin

#endif  // QKIN_KINETIC_EQUATIONS_HPP
