#ifndef QKIN_MEANFIELD_LIMIT_HPP
#define QKIN_MEANFIELD_LIMIT_HPP

#include "qkin/dual_hierarchy.hpp"
#include "qkin/quadrature.hpp"

// The scaling limit of the observable hierarchy: a recurrence of evolution
// equations whose s-entry streams freely and is driven by the (s-1)-entry
// through the epsilon-free interaction generator. Two independent evaluation
// routes (closed ODE recurrence and nested time-ordered integrals) plus the
// epsilon-sweep convergence experiment.

namespace qkin {

// d/dt g_s = sum_i N_0(i) g_s + sum_{j1 != j2} N_int(j1,j2) g_{s-1}(Y\(j1)).
ObservableSequence limit_evolve_ode(const ParticleModel& model,
                                    const ObservableSequence& g0, double t,
                                    double tol = 1e-12);

// Sum over n <= s-1 of the n-fold time-ordered integrals with free
// propagation between interaction insertions. Throws when an entry needs
// more nesting than the quadrature allows.
ObservableSequence limit_evolve_quadrature(const ParticleModel& model,
                                           const ObservableSequence& g0,
                                           double t,
                                           const SimplexQuadrature& quad);

// The (s-1)-fold integral term alone, for data supported on one particle.
NBodyOperator additive_limit(const ParticleModel& model, const NBodyOperator& g1,
                             int s, double t, const SimplexQuadrature& quad);

struct ConvergenceRecord {
  double epsilon = 0.0;
  int s = 0;
  double t = 0.0;
  double error = 0.0;  // operator norm of eps^{-s} G_s^eps(t) - g_s(t)
  double order = 0.0;  // log ratio against the previous epsilon, NaN first
};

// Scaled data G_s(0) = eps^s g_s(0) evolved at interaction eps, rescaled and
// compared to the limit evolution. eps_list must decrease strictly.
std::vector<ConvergenceRecord> meanfield_convergence(
    const ParticleModel& model, const ObservableSequence& g0,
    const std::vector<double>& eps_list, double t, double ode_tol = 1e-12);

struct FactorizationRecord {
  double epsilon = 0.0;
  double deviation = 0.0;  // ||G_s^eps(t) g - prod G_1(t,j) g||
};

// Distance between the interacting group and the product of one-particle
// groups on a fixed observable, along an epsilon sweep.
std::vector<FactorizationRecord> group_factorization_check(
    const ParticleModel& model, int s, double t,
    const std::vector<double>& eps_list, const NBodyOperator& g);

}  // namespace qkin

#endif  // QKIN_MEANFIELD_LIMIT_HPP
