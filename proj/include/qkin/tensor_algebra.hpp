#ifndef QKIN_TENSOR_ALGEBRA_HPP
#define QKIN_TENSOR_ALGEBRA_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Finite-dimensional n-particle operator algebra: tensor embeddings, partial
// traces, permutation symmetry, the observable/state trace pairing and the
// weighted sequence norm. The single-particle space is C^d; an s-particle
// operator is a dense d^s x d^s matrix with particle 0 as the most
// significant tensor index (row-major composite index).
//
// Dimensionless units throughout: h = 2 pi hbar = 1 and unit particle mass;
// the spatial dimension of the continuum picture has no numeric role at
// finite dimension.

namespace qkin {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// d^n as a flat index size. Throws if the result would overflow a long.
long ipow(int base, int exp);

double factorial(int n);

// Single-particle model data: kinetic matrix K (d x d, Hermitian), two-body
// potential Phi (d^2 x d^2, Hermitian and invariant under the tensor-factor
// swap) and the interaction scaling epsilon.
struct ParticleModel {
  int dim = 2;
  Mat kinetic;
  Mat pair_potential;
  double epsilon = 1.0;

  // Empty when all invariants hold, one message per violation otherwise.
  std::vector<std::string> validate() const;

  ParticleModel with_epsilon(double eps) const;
  ParticleModel with_potential_scale(double factor) const;
};

// Dense operator on the s-particle space. s = 0 stores a 1x1 scalar.
struct NBodyOperator {
  int dim = 2;
  int particles = 0;
  Mat mat;

  long space_dim() const { return ipow(dim, particles); }

  static NBodyOperator scalar(int dim, Complex value);
  static NBodyOperator identity(int dim, int particles);
  static NBodyOperator zero(int dim, int particles);

  // Checks the matrix block size against dim/particles.
  bool shape_ok() const;
};

// Truncated sequence (g_0, g_1, ..., g_S); entry s acts on s particles.
struct ObservableSequence {
  int dim = 2;
  std::vector<NBodyOperator> entries;

  int truncation() const { return static_cast<int>(entries.size()) - 1; }
  static ObservableSequence zero(int dim, int truncation);

  // Permutation-symmetry defect of each entry must stay below tol.
  std::vector<std::string> validate(double tol = 1e-10) const;
};

// Truncated state sequence (F_0 = 1, F_1, ..., F_S).
struct StateSequence {
  int dim = 2;
  std::vector<NBodyOperator> entries;

  int truncation() const { return static_cast<int>(entries.size()) - 1; }
  static StateSequence vacuum(int dim, int truncation);
  // F_s = prod_{i<s} f1 (chaos data built from a one-particle operator).
  static StateSequence chaos(const Mat& f1, int truncation);

  std::vector<std::string> validate(double tol = 1e-10) const;
};

// op lives on slots.size() particles; the result lives on host_particles
// particles with op's factor j routed to position slots[j] and identity
// elsewhere. Slots must be distinct and inside the host.
NBodyOperator embed(const NBodyOperator& op, const std::vector<int>& slots,
                    int host_particles);

// Trace over all positions not listed in keep; keep must be strictly
// increasing. Tr(result) == Tr(op).
NBodyOperator partial_trace(const NBodyOperator& op,
                            const std::vector<int>& keep);

// Conjugation by the permutation matrix: the particle at position p is moved
// to position perm[p].
NBodyOperator permute_particles(const NBodyOperator& op,
                                const std::vector<int>& perm);

// Average over all particle permutations.
NBodyOperator symmetrize(const NBodyOperator& op);

// Max operator-norm deviation under adjacent transpositions; 0 for s <= 1.
double check_symmetry(const NBodyOperator& op);

// sum_n (1/n!) Tr(g_n f_n) over the common truncation range. Real part of
// the sum; the imaginary part is below 1e-10 for Hermitian sequences.
double dual_pairing(const ObservableSequence& g, const StateSequence& f);

struct PairingReport {
  double value = 0.0;
  double imag_residual = 0.0;
  std::vector<double> terms;  // signed per-n contributions
};
PairingReport dual_pairing_report(const ObservableSequence& g,
                                  const StateSequence& f);

// max_n gamma^n / n! * ||g_n||  (operator norm), 0 < gamma < 1.
double gamma_norm(const ObservableSequence& g, double gamma);

// Largest singular value.
double operator_norm(const Mat& m);
// Sum of singular values.
double trace_norm(const Mat& m);
// Operator norm of m - m^dagger.
double hermiticity_defect(const Mat& m);
double max_abs(const Mat& m);

Mat kron(const Mat& a, const Mat& b);
// n-fold tensor power of a d x d matrix.
Mat kron_power(const Mat& a, int n);
// Tensor-factor exchange on C^d (x) C^d.
Mat swap_matrix(int dim);

}  // namespace qkin

#endif  // QKIN_TENSOR_ALGEBRA_HPP
