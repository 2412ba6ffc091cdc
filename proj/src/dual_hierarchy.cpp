#include "qkin/dual_hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkin/ode.hpp"

namespace qkin {

namespace {

std::vector<int> complement(int s, const std::vector<int>& subset) {
  std::vector<int> out;
  std::vector<bool> in(s, false);
  for (int p : subset) in[p] = true;
  for (int p = 0; p < s; ++p)
    if (!in[p]) out.push_back(p);
  return out;
}

void check_sequence(const HamiltonianSet& H, const ObservableSequence& G0) {
  if (G0.dim != H.model().dim)
    throw std::invalid_argument("evolve: sequence dimension differs from the model");
  if (G0.truncation() > H.max_particles())
    throw std::invalid_argument("evolve: truncation exceeds the Hamiltonian cache");
}

}  // namespace

ObservableSequence evolve_expansion(const HamiltonianSet& H,
                                    const ObservableSequence& G0, double t) {
  check_sequence(H, G0);
  const int S = G0.truncation();
  ObservableSequence out = ObservableSequence::zero(G0.dim, S);
  out.entries[0] = G0.entries[0];

  for (int s = 1; s <= S; ++s) {
    NBodyOperator acc = NBodyOperator::zero(G0.dim, s);
    for (int n = 0; n <= s - 1; ++n) {
      for (const auto& subset : subsets_of_size(s, n)) {
        const std::vector<int> cluster = complement(s, subset);
        CumulantSpec spec;
        spec.time = t;
        spec.direction = GroupDirection::forward;
        spec.cluster = cluster;
        spec.singles = subset;
        spec.ambient = s;
        acc.mat += forward_cumulant(H, spec, G0.entries[s - n]).mat;
      }
    }
    out.entries[s] = acc;
  }
  return out;
}

ObservableSequence evolve_expansion_ordered(const HamiltonianSet& H,
                                            const ObservableSequence& G0,
                                            double t) {
  check_sequence(H, G0);
  const int S = G0.truncation();
  ObservableSequence out = ObservableSequence::zero(G0.dim, S);
  out.entries[0] = G0.entries[0];

  std::vector<int> all;
  for (int s = 1; s <= S; ++s) {
    all.push_back(s - 1);
    NBodyOperator acc = NBodyOperator::zero(G0.dim, s);
    for (int n = 0; n <= s - 1; ++n) {
      for (const auto& tuple : injective_assignments(n, all)) {
        std::vector<int> sorted = tuple;
        std::sort(sorted.begin(), sorted.end());
        CumulantSpec spec;
        spec.time = t;
        spec.direction = GroupDirection::forward;
        spec.cluster = complement(s, sorted);
        spec.singles = tuple;  // enumeration order; partitions ignore it
        spec.ambient = s;
        acc.mat += forward_cumulant(H, spec, G0.entries[s - n]).mat / factorial(n);
      }
    }
    out.entries[s] = acc;
  }
  return out;
}

ObservableSequence evolve_ode_oracle(const HamiltonianSet& H,
                                     const ObservableSequence& G0, double t,
                                     double tol) {
  check_sequence(H, G0);
  const int S = G0.truncation();
  const int d = G0.dim;
  const double eps = H.model().epsilon;

  // Flatten entries 1..S into one complex vector.
  std::vector<long> offsets(S + 2, 0);
  offsets[1] = 0;
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    offsets[s + 1] = offsets[s] + n * n;
  }
  const long total = offsets[S + 1];
  Vec y0(total);
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    y0.segment(offsets[s], n * n) =
        Eigen::Map<const Vec>(G0.entries[s].mat.data(), n * n);
  }

  auto rhs = [&](const Vec& y, Vec& dy, double) {
    dy.resize(total);
    for (int s = 1; s <= S; ++s) {
      const long n = ipow(d, s);
      const Mat gs = Eigen::Map<const Mat>(y.data() + offsets[s], n, n);
      const Mat& hs = H.hamiltonian(s);
      Mat ds = Complex(0, -1) * (gs * hs - hs * gs);
      if (s >= 2) {
        const long m = ipow(d, s - 1);
        const Mat gprev = Eigen::Map<const Mat>(y.data() + offsets[s - 1], m, m);
        NBodyOperator prev{d, s - 1, gprev};
        for (int j1 = 0; j1 < s; ++j1) {
          const NBodyOperator lifted = embed(prev, complement(s, {j1}), s);
          for (int j2 = 0; j2 < s; ++j2) {
            if (j2 == j1) continue;
            ds += eps * liouvillian_int(H.model(), j1, j2, lifted).mat;
          }
        }
      }
      Eigen::Map<Mat>(dy.data() + offsets[s], n, n) = ds;
    }
  };

  const Vec yt = integrate_complex_ode(rhs, y0, 0.0, t, tol);
  ObservableSequence out = ObservableSequence::zero(d, S);
  out.entries[0] = G0.entries[0];
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    out.entries[s].mat = Eigen::Map<const Mat>(yt.data() + offsets[s], n, n);
  }
  return out;
}

NBodyOperator additive_evolve(const HamiltonianSet& H, const NBodyOperator& g1,
                              int s, double t) {
  if (g1.particles != 1)
    throw std::invalid_argument("additive_evolve: input must be a one-particle observable");
  if (s < 1 || s > H.max_particles())
    throw std::invalid_argument("additive_evolve: bad particle count");

  NBodyOperator total = NBodyOperator::zero(g1.dim, s);
  for (int j = 0; j < s; ++j) total.mat += embed(g1, {j}, s).mat;

  CumulantSpec spec;
  spec.time = t;
  spec.direction = GroupDirection::forward;
  for (int p = 0; p < s; ++p) spec.singles.push_back(p);
  spec.ambient = s;
  return apply_cumulant(H, spec, total);
}

MeanValueReport mean_value(const ObservableSequence& G_t, const StateSequence& F0) {
  const PairingReport pairing = dual_pairing_report(
      G_t, F0);
  MeanValueReport out;
  out.value = pairing.value;
  out.imag_residual = pairing.imag_residual;
  out.terms = pairing.terms;
  for (double v : pairing.terms) out.magnitudes.push_back(std::abs(v));
  return out;
}

BoundReport verify_bound(const HamiltonianSet& H, const ObservableSequence& G0,
                         double t, double gamma) {
  const double e_inv = std::exp(-1.0);
  if (gamma >= e_inv)
    throw std::invalid_argument("verify_bound: gamma must be below 1/e");
  BoundReport out;
  out.gamma = gamma;
  out.t = t;
  const double base = gamma_norm(G0, gamma);
  const ObservableSequence Gt = evolve_expansion(H, G0, t);
  out.ratio = base == 0.0 ? 0.0 : gamma_norm(Gt, gamma) / base;
  out.bound = std::exp(2.0) / (1.0 - gamma * std::exp(1.0));
  out.ok = out.ratio <= out.bound;
  return out;
}

}  // namespace qkin
