#ifndef QKIN_DYNAMICS_HPP
#define QKIN_DYNAMICS_HPP

#include <vector>

#include "qkin/tensor_algebra.hpp"

// Hamiltonians H_n = sum_i K(i) + epsilon sum_{i<j} Phi(i,j), their
// Heisenberg conjugation groups, the adjoint state-side groups and the
// commutator generators. Propagation goes through cached Hermitian
// eigendecompositions, so the group law and isometry hold to roundoff.

namespace qkin {

Mat assemble_hamiltonian(const ParticleModel& model, int particles);

class HamiltonianSet {
 public:
  HamiltonianSet(ParticleModel model, int max_particles);

  const ParticleModel& model() const { return model_; }
  int max_particles() const { return max_particles_; }

  const Mat& hamiltonian(int n) const;
  const Eigen::VectorXd& eigenvalues(int n) const;
  const Mat& eigenvectors(int n) const;

  // e^{i t H_n}
  Mat propagator(int n, double t) const;
  // n-fold tensor power of e^{i t K}
  Mat free_propagator(int n, double t) const;

  // e^{i t H_n} g e^{-i t H_n}
  NBodyOperator heisenberg(double t, const NBodyOperator& g) const;
  // e^{-i t H_n} f e^{i t H_n}; adjoint of heisenberg under the trace pairing
  NBodyOperator schrodinger(double t, const NBodyOperator& f) const;

 private:
  ParticleModel model_;
  int max_particles_;
  std::vector<Mat> hamiltonians_;
  std::vector<Eigen::VectorXd> eigenvalues_;
  std::vector<Mat> eigenvectors_;
};

// -i [g, K(i)] with K(i) embedded into g's particle set.
NBodyOperator liouvillian_free(const ParticleModel& model, int i,
                               const NBodyOperator& g);

// -i [g, Phi(i,j)], epsilon-free; callers apply the scaling explicitly.
NBodyOperator liouvillian_int(const ParticleModel& model, int i, int j,
                              const NBodyOperator& g);

// Products of single-particle propagators (interaction-free dynamics).
class FreeFlow {
 public:
  explicit FreeFlow(const ParticleModel& model);

  const ParticleModel& model() const { return model_; }
  // e^{i t K}
  Mat single(double t) const;
  // Tensor product with e^{i t K} at the listed slots and identity elsewhere.
  Mat partial_product(double t, const std::vector<int>& slots,
                      int host_particles) const;
  // Conjugation g -> U g U^dagger with U = product of e^{i t K} on all slots.
  NBodyOperator heisenberg(double t, const NBodyOperator& g) const;
  NBodyOperator schrodinger(double t, const NBodyOperator& f) const;

 private:
  ParticleModel model_;
  Eigen::VectorXd eigenvalues_;
  Mat eigenvectors_;
};

}  // namespace qkin

#endif  // QKIN_DYNAMICS_HPP
