#ifndef QKIN_GKE_FUNCTIONALS_HPP
#define QKIN_GKE_FUNCTIONALS_HPP

#include <cstdint>

#include "qkin/dual_hierarchy.hpp"

// Closed kinetic description of states driven by a one-particle operator:
// evolution operators built from scattering cumulants over dissections of
// the added particles, marginal functionals of the state, the one-particle
// series, the kinetic cluster expansion identity that certifies the whole
// construction, the residual of the closed kinetic equation and the duality
// between the observable and state pipelines.

namespace qkin {

struct FunctionalTruncation {
  int n_max = 2;       // highest evolution-operator order
  int s_max = 4;       // highest marginal index in duality sums
  int series_cap = 5;  // highest order of the one-particle series
  double lambda = 0.2; // subnormalization of the driving state

  std::vector<std::string> validate() const;
};

// (n+1)-order evolution operator on a cluster of size s with n added
// particles, applied to a target on s+n particles. Alternating-sign sum over
// compositions of n; each stage attaches a dissection of the newest block of
// added particles to distinct hosts through scattering cumulants. n <= 2.
NBodyOperator evolution_operator(const HamiltonianSet& H, double t, int s, int n,
                                 const NBodyOperator& target_on_ambient);

// F_s(t | F1) = sum_{n<=n_max} (1/n!) Tr_{s..s+n-1} V_{1+n}(t) prod F1(t).
NBodyOperator marginal_functional(const HamiltonianSet& H, double t, int s,
                                  const Mat& f1_t, const FunctionalTruncation& trunc);

// Per-n contributions of the functional (for correction-ordering reports).
std::vector<NBodyOperator> marginal_functional_terms(
    const HamiltonianSet& H, double t, int s, const Mat& f1_t,
    const FunctionalTruncation& trunc);

struct F1SeriesResult {
  Mat value;
  std::vector<double> term_norms;  // trace norms, prefactors included
};

// F1(t) = sum_{n<=cap} (1/n!) Tr_{1..n} A_{1+n}(-t) prod F1_0. Requires the
// trace norm of F1_0 below 1/e.
F1SeriesResult f1_series(const HamiltonianSet& H, const Mat& f1_0, double t,
                         int series_cap);

struct ClusterIdentityReport {
  double max_deviation = 0.0;
  int trials = 0;
};

// Rebuilds the backward cumulant of order 1+n from evolution operators,
// backward sub-cumulants attached over dissections, and single-particle
// flows, then compares against the direct backward cumulant on random
// Hermitian targets. Passing this identity certifies the dissection and
// host-attachment conventions.
ClusterIdentityReport cluster_expansion_identity(const HamiltonianSet& H, int n,
                                                 double t, int s, int trials,
                                                 std::uint64_t seed);

struct GkeResidualReport {
  double residual = 0.0;       // ||dF1/dt - rhs|| at the probe time
  double tail_estimate = 0.0;  // last series term + last functional term
  double fd_step = 0.0;
};

// Central-difference derivative of the one-particle series against the
// closed kinetic right-hand side with the truncated collision functional.
GkeResidualReport gke_residual(const HamiltonianSet& H, const Mat& f1_0, double t,
                               const FunctionalTruncation& trunc,
                               double fd_step = 1e-4);

struct DualityReport {
  double lhs = 0.0;  // <G(t) | chaos F0>
  double rhs = 0.0;  // <G(0) | functionals of F1(t)>
  double abs_err = 0.0;
  double lhs_tail = 0.0;
  double rhs_tail = 0.0;
  std::vector<double> lhs_terms;
  std::vector<double> rhs_terms;
};

// Forward pipeline (cumulant expansion on observables, paired against chaos
// data) versus backward pipeline (marginal functionals of the evolved
// one-particle state).
DualityReport duality_check(const HamiltonianSet& H, const ObservableSequence& G0,
                            const Mat& f1_0, double t,
                            const FunctionalTruncation& trunc);

// Order-by-order match for additive data: the total-particle-order p term of
// the forward pipeline against the (p-1)-th series term of the backward one.
std::vector<double> additive_term_match(const HamiltonianSet& H,
                                        const NBodyOperator& g1, const Mat& f1_0,
                                        double t, int max_order);

// Max |floating - exact| over every chain weight entering the evolution
// operators up to order n at cluster size s; the exact route uses integer
// rationals.
double rational_weight_audit(int s, int n);

}  // namespace qkin

#endif  // QKIN_GKE_FUNCTIONALS_HPP
