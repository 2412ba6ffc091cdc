#ifndef QKIN_TESTS_FIXTURES_HPP
#define QKIN_TESTS_FIXTURES_HPP

#include <random>

#include "qkin/tensor_algebra.hpp"

// Seeded fixtures shared across the test suites. Everything is derived from
// an explicit engine so expected values can be frozen.

namespace qkin::testing {

inline Mat random_complex(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat out(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) out(r, c) = Complex(dist(rng), dist(rng));
  return out;
}

inline Mat random_hermitian(std::mt19937_64& rng, long n, double scale = 1.0) {
  Mat a = random_complex(rng, n, n);
  return scale * 0.5 * (a + a.adjoint()).eval();
}

// Positive Hermitian with trace lambda.
inline Mat random_state(std::mt19937_64& rng, long n, double lambda) {
  Mat a = random_complex(rng, n, n);
  Mat f = a * a.adjoint();
  return (lambda / f.trace().real()) * f;
}

inline NBodyOperator random_observable(std::mt19937_64& rng, int dim,
                                       int particles, double scale = 1.0) {
  NBodyOperator op;
  op.dim = dim;
  op.particles = particles;
  op.mat = random_hermitian(rng, ipow(dim, particles), scale);
  return symmetrize(op);
}

inline ObservableSequence random_sequence(std::mt19937_64& rng, int dim,
                                          int truncation, double scale = 1.0) {
  ObservableSequence g = ObservableSequence::zero(dim, truncation);
  g.entries[0] = NBodyOperator::scalar(dim, 0.0);
  for (int s = 1; s <= truncation; ++s)
    g.entries[s] = random_observable(rng, dim, s, scale);
  return g;
}

// Fixed two-level model used throughout: K noncommuting with Phi, Phi swap
// symmetric by construction.
inline ParticleModel default_model(double epsilon = 1.0) {
  ParticleModel m;
  m.dim = 2;
  m.epsilon = epsilon;
  m.kinetic = Mat::Zero(2, 2);
  m.kinetic << 0.15, Complex(0.2, 0.0), Complex(0.2, 0.0), -0.15;
  Mat sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  m.pair_potential = 0.5 * kron(sx, sx) + 0.25 * kron(sz, sz);
  return m;
}

inline ParticleModel free_model(double epsilon = 0.0) {
  ParticleModel m = default_model(epsilon);
  m.pair_potential = Mat::Zero(4, 4);
  return m;
}

}  // namespace qkin::testing

#endif  // QKIN_TESTS_FIXTURES_HPP
