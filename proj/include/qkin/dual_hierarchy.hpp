#ifndef QKIN_DUAL_HIERARCHY_HPP
#define QKIN_DUAL_HIERARCHY_HPP

#include "qkin/cumulants.hpp"

// Evolution of truncated observable sequences: the cumulant solution
// expansion, a closed lower-triangular ODE oracle for the same dynamics, the
// additive-observable shortcut, the mean-value functional and the weighted
// norm bound. The s-entry couples only to the (s-1)-entry, so a truncated
// sequence evolves exactly.

namespace qkin {

// G_s(t) = sum_{n=0}^{s-1} sum_{|X|=n} A_{1+n}(t, {Y\X}, X) G_{s-n}(0, Y\X).
// The ordered-tuple sum with its 1/n! prefactor collapses to a subset sum for
// symmetric entries; the term hitting the scalar entry (X = Y) vanishes
// identically because the signed partition weights cancel pairwise.
ObservableSequence evolve_expansion(const HamiltonianSet& H,
                                    const ObservableSequence& G0, double t);

// Literal ordered-tuple evaluation of the same expansion (debug route for the
// subset collapse).
ObservableSequence evolve_expansion_ordered(const HamiltonianSet& H,
                                            const ObservableSequence& G0,
                                            double t);

// Adaptive integration of
//   d/dt G_s = (sum_i N_0(i) + eps sum_{i<j} N_int(i,j)) G_s
//              + eps sum_{j1 != j2} N_int(j1,j2) G_{s-1}(Y\(j1))
// over the whole truncated sequence at once.
ObservableSequence evolve_ode_oracle(const HamiltonianSet& H,
                                     const ObservableSequence& G0, double t,
                                     double tol = 1e-12);

// s-order cumulant applied to sum_j g1(j): the closed form for sequences
// supported on one particle.
NBodyOperator additive_evolve(const HamiltonianSet& H, const NBodyOperator& g1,
                              int s, double t);

struct MeanValueReport {
  double value = 0.0;
  double imag_residual = 0.0;
  std::vector<double> terms;       // signed per-s contributions
  std::vector<double> magnitudes;  // |terms|, tail diagnostics
};
MeanValueReport mean_value(const ObservableSequence& G_t, const StateSequence& F0);

struct BoundReport {
  double gamma = 0.0;
  double t = 0.0;
  double ratio = 0.0;  // ||G(t)||_gamma / ||G(0)||_gamma
  double bound = 0.0;  // e^2 (1 - gamma e)^{-1}
  bool ok = false;
};
// Requires gamma < 1/e.
BoundReport verify_bound(const HamiltonianSet& H, const ObservableSequence& G0,
                         double t, double gamma);

}  // namespace qkin

#endif  // QKIN_DUAL_HIERARCHY_HPP
