#include "qkin/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace qkin {

long ipow(int base, int exp) {
  if (base < 1 || exp < 0) throw std::invalid_argument("ipow: bad arguments");
  long out = 1;
  for (int k = 0; k < exp; ++k) {
    if (out > (1L << 40)) throw std::overflow_error("ipow: index space too large");
    out *= base;
  }
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

namespace {

// Digits of a composite index, particle 0 most significant.
inline void decompose(long index, int dim, int particles, int* digits) {
  for (int p = particles - 1; p >= 0; --p) {
    digits[p] = static_cast<int>(index % dim);
    index /= dim;
  }
}

std::string matrix_summary(double defect) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << defect;
  return os.str();
}

}  // namespace

std::vector<std::string> ParticleModel::validate() const {
  std::vector<std::string> bad;
  if (dim < 1) bad.push_back("dim must be >= 1");
  if (epsilon < 0.0) bad.push_back("epsilon must be >= 0");
  if (kinetic.rows() != dim || kinetic.cols() != dim)
    bad.push_back("kinetic matrix must be dim x dim");
  const long d2 = static_cast<long>(dim) * dim;
  if (pair_potential.rows() != d2 || pair_potential.cols() != d2)
    bad.push_back("pair potential must be dim^2 x dim^2");
  if (!bad.empty()) return bad;

  const double k_scale = std::max(1.0, operator_norm(kinetic));
  const double k_defect = hermiticity_defect(kinetic);
  if (k_defect > 1e-12 * k_scale)
    bad.push_back("kinetic matrix not Hermitian, defect " + matrix_summary(k_defect));
  const double p_scale = std::max(1.0, operator_norm(pair_potential));
  const double p_defect = hermiticity_defect(pair_potential);
  if (p_defect > 1e-12 * p_scale)
    bad.push_back("pair potential not Hermitian, defect " + matrix_summary(p_defect));
  const Mat swap = swap_matrix(dim);
  const Mat conj = swap * pair_potential * swap;
  if (conj != pair_potential)
    bad.push_back("pair potential not swap symmetric, defect " +
                  matrix_summary(max_abs(conj - pair_potential)));
  return bad;
}

ParticleModel ParticleModel::with_epsilon(double eps) const {
  ParticleModel out = *this;
  out.epsilon = eps;
  return out;
}

ParticleModel ParticleModel::with_potential_scale(double factor) const {
  ParticleModel out = *this;
  out.pair_potential = factor * pair_potential;
  return out;
}

NBodyOperator NBodyOperator::scalar(int dim, Complex value) {
  NBodyOperator out;
  out.dim = dim;
  out.particles = 0;
  out.mat = Mat::Constant(1, 1, value);
  return out;
}

NBodyOperator NBodyOperator::identity(int dim, int particles) {
  NBodyOperator out;
  out.dim = dim;
  out.particles = particles;
  const long n = ipow(dim, particles);
  out.mat = Mat::Identity(n, n);
  return out;
}

NBodyOperator NBodyOperator::zero(int dim, int particles) {
  NBodyOperator out;
  out.dim = dim;
  out.particles = particles;
  const long n = ipow(dim, particles);
  out.mat = Mat::Zero(n, n);
  return out;
}

bool NBodyOperator::shape_ok() const {
  const long n = ipow(dim, particles);
  return mat.rows() == n && mat.cols() == n;
}

ObservableSequence ObservableSequence::zero(int dim, int truncation) {
  ObservableSequence out;
  out.dim = dim;
  for (int s = 0; s <= truncation; ++s)
    out.entries.push_back(NBodyOperator::zero(dim, s));
  return out;
}

std::vector<std::string> ObservableSequence::validate(double tol) const {
  std::vector<std::string> bad;
  for (std::size_t s = 0; s < entries.size(); ++s) {
    const NBodyOperator& g = entries[s];
    if (g.dim != dim || g.particles != static_cast<int>(s) || !g.shape_ok()) {
      bad.push_back("entry " + std::to_string(s) + " has wrong shape");
      continue;
    }
    const double defect = check_symmetry(g);
    if (defect > tol)
      bad.push_back("entry " + std::to_string(s) + " symmetry defect " +
                    matrix_summary(defect));
  }
  return bad;
}

StateSequence StateSequence::vacuum(int dim, int truncation) {
  StateSequence out;
  out.dim = dim;
  out.entries.push_back(NBodyOperator::scalar(dim, 1.0));
  for (int s = 1; s <= truncation; ++s)
    out.entries.push_back(NBodyOperator::zero(dim, s));
  return out;
}

StateSequence StateSequence::chaos(const Mat& f1, int truncation) {
  StateSequence out;
  out.dim = static_cast<int>(f1.rows());
  out.entries.push_back(NBodyOperator::scalar(out.dim, 1.0));
  Mat prod = Mat::Identity(1, 1);
  for (int s = 1; s <= truncation; ++s) {
    prod = kron(prod, f1);
    NBodyOperator e;
    e.dim = out.dim;
    e.particles = s;
    e.mat = prod;
    out.entries.push_back(e);
  }
  return out;
}

std::vector<std::string> StateSequence::validate(double tol) const {
  std::vector<std::string> bad;
  if (entries.empty() || entries[0].particles != 0 ||
      std::abs(entries[0].mat(0, 0) - Complex(1.0)) > tol)
    bad.push_back("entry 0 must be the scalar 1");
  for (std::size_t s = 1; s < entries.size(); ++s) {
    const NBodyOperator& f = entries[s];
    if (f.dim != dim || f.particles != static_cast<int>(s) || !f.shape_ok()) {
      bad.push_back("entry " + std::to_string(s) + " has wrong shape");
      continue;
    }
    if (hermiticity_defect(f.mat) > tol)
      bad.push_back("entry " + std::to_string(s) + " not Hermitian");
    if (check_symmetry(f) > tol)
      bad.push_back("entry " + std::to_string(s) + " not permutation symmetric");
  }
  return bad;
}

NBodyOperator embed(const NBodyOperator& op, const std::vector<int>& slots,
                    int host_particles) {
  const int d = op.dim;
  const int k = op.particles;
  if (static_cast<int>(slots.size()) != k)
    throw std::invalid_argument("embed: slot count must match particle count");
  std::vector<bool> used(host_particles, false);
  for (int s : slots) {
    if (s < 0 || s >= host_particles)
      throw std::invalid_argument("embed: slot index out of range");
    if (used[s]) throw std::invalid_argument("embed: duplicate slot index");
    used[s] = true;
  }

  std::vector<long> stride(host_particles);
  for (int p = 0; p < host_particles; ++p)
    stride[p] = ipow(d, host_particles - 1 - p);

  std::vector<int> rest;
  for (int p = 0; p < host_particles; ++p)
    if (!used[p]) rest.push_back(p);

  const long op_dim = ipow(d, k);
  const long rest_dim = ipow(d, static_cast<int>(rest.size()));

  // Composite-host offset of every op index and every identity-padding index.
  std::vector<long> op_offset(op_dim);
  std::vector<int> digits(std::max(k, static_cast<int>(rest.size())) + 1);
  for (long idx = 0; idx < op_dim; ++idx) {
    decompose(idx, d, k, digits.data());
    long off = 0;
    for (int j = 0; j < k; ++j) off += digits[j] * stride[slots[j]];
    op_offset[idx] = off;
  }
  std::vector<long> rest_offset(rest_dim);
  for (long idx = 0; idx < rest_dim; ++idx) {
    decompose(idx, d, static_cast<int>(rest.size()), digits.data());
    long off = 0;
    for (std::size_t j = 0; j < rest.size(); ++j)
      off += digits[j] * stride[rest[j]];
    rest_offset[idx] = off;
  }

  NBodyOperator out = NBodyOperator::zero(d, host_particles);
  for (long r = 0; r < op_dim; ++r)
    for (long c = 0; c < op_dim; ++c) {
      const Complex v = op.mat(r, c);
      if (v == Complex(0.0)) continue;
      for (long e = 0; e < rest_dim; ++e)
        out.mat(op_offset[r] + rest_offset[e], op_offset[c] + rest_offset[e]) = v;
    }
  return out;
}

NBodyOperator partial_trace(const NBodyOperator& op,
                            const std::vector<int>& keep) {
  const int d = op.dim;
  const int s = op.particles;
  if (!std::is_sorted(keep.begin(), keep.end()) ||
      std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("partial_trace: keep must be strictly increasing");
  for (int p : keep)
    if (p < 0 || p >= s)
      throw std::invalid_argument("partial_trace: keep index out of range");

  std::vector<long> stride(s);
  for (int p = 0; p < s; ++p) stride[p] = ipow(d, s - 1 - p);

  std::vector<int> traced;
  {
    std::vector<bool> kept(s, false);
    for (int p : keep) kept[p] = true;
    for (int p = 0; p < s; ++p)
      if (!kept[p]) traced.push_back(p);
  }

  const int k = static_cast<int>(keep.size());
  const long keep_dim = ipow(d, k);
  const long traced_dim = ipow(d, static_cast<int>(traced.size()));

  std::vector<long> keep_offset(keep_dim);
  std::vector<int> digits(s + 1);
  for (long idx = 0; idx < keep_dim; ++idx) {
    decompose(idx, d, k, digits.data());
    long off = 0;
    for (int j = 0; j < k; ++j) off += digits[j] * stride[keep[j]];
    keep_offset[idx] = off;
  }
  std::vector<long> traced_offset(traced_dim);
  for (long idx = 0; idx < traced_dim; ++idx) {
    decompose(idx, d, static_cast<int>(traced.size()), digits.data());
    long off = 0;
    for (std::size_t j = 0; j < traced.size(); ++j)
      off += digits[j] * stride[traced[j]];
    traced_offset[idx] = off;
  }

  NBodyOperator out = NBodyOperator::zero(d, k);
  for (long r = 0; r < keep_dim; ++r)
    for (long c = 0; c < keep_dim; ++c) {
      Complex acc = 0.0;
      for (long e = 0; e < traced_dim; ++e)
        acc += op.mat(keep_offset[r] + traced_offset[e],
                      keep_offset[c] + traced_offset[e]);
      out.mat(r, c) = acc;
    }
  return out;
}

NBodyOperator permute_particles(const NBodyOperator& op,
                                const std::vector<int>& perm) {
  const int d = op.dim;
  const int s = op.particles;
  if (static_cast<int>(perm.size()) != s)
    throw std::invalid_argument("permute_particles: wrong permutation size");
  {
    std::vector<bool> seen(s, false);
    for (int p : perm) {
      if (p < 0 || p >= s || seen[p])
        throw std::invalid_argument("permute_particles: not a permutation");
      seen[p] = true;
    }
  }
  std::vector<long> stride(s);
  for (int p = 0; p < s; ++p) stride[p] = ipow(d, s - 1 - p);

  const long n = op.space_dim();
  std::vector<long> map(n);
  std::vector<int> digits(s + 1);
  for (long idx = 0; idx < n; ++idx) {
    decompose(idx, d, s, digits.data());
    long off = 0;
    for (int p = 0; p < s; ++p) off += digits[p] * stride[perm[p]];
    map[idx] = off;
  }
  NBodyOperator out = NBodyOperator::zero(d, s);
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c) out.mat(map[r], map[c]) = op.mat(r, c);
  return out;
}

NBodyOperator symmetrize(const NBodyOperator& op) {
  const int s = op.particles;
  if (s <= 1) return op;
  std::vector<int> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  NBodyOperator out = NBodyOperator::zero(op.dim, s);
  long count = 0;
  do {
    out.mat += permute_particles(op, perm).mat;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.mat /= static_cast<double>(count);
  return out;
}

double check_symmetry(const NBodyOperator& op) {
  const int s = op.particles;
  if (s <= 1) return 0.0;
  std::vector<int> perm(s);
  double worst = 0.0;
  for (int p = 0; p + 1 < s; ++p) {
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[p], perm[p + 1]);
    worst = std::max(worst,
                     operator_norm(permute_particles(op, perm).mat - op.mat));
  }
  return worst;
}

PairingReport dual_pairing_report(const ObservableSequence& g,
                                  const StateSequence& f) {
  if (g.dim != f.dim)
    throw std::invalid_argument("dual_pairing: single-particle dimensions differ");
  PairingReport report;
  const int top = std::min(g.truncation(), f.truncation());
  Complex acc = 0.0;
  for (int n = 0; n <= top; ++n) {
    const NBodyOperator& gn = g.entries[n];
    const NBodyOperator& fn = f.entries[n];
    if (gn.mat.rows() != fn.mat.rows())
      throw std::invalid_argument("dual_pairing: entry dimension mismatch at n=" +
                                  std::to_string(n));
    const Complex term = (gn.mat * fn.mat).trace() / factorial(n);
    report.terms.push_back(term.real());
    acc += term;
  }
  report.value = acc.real();
  report.imag_residual = std::abs(acc.imag());
  return report;
}

double dual_pairing(const ObservableSequence& g, const StateSequence& f) {
  return dual_pairing_report(g, f).value;
}

double gamma_norm(const ObservableSequence& g, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma_norm: gamma must lie in (0,1)");
  double best = 0.0;
  double scale = 1.0;  // gamma^n / n!
  for (int n = 0; n <= g.truncation(); ++n) {
    if (n > 0) scale *= gamma / n;
    best = std::max(best, scale * operator_norm(g.entries[n].mat));
  }
  return best;
}

double operator_norm(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double hermiticity_defect(const Mat& m) {
  return operator_norm(m - m.adjoint());
}

double max_abs(const Mat& m) {
  return m.cwiseAbs().maxCoeff();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_power(const Mat& a, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, a);
  return out;
}

Mat swap_matrix(int dim) {
  const long n = static_cast<long>(dim) * dim;
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out(i * dim + j, j * dim + i) = 1.0;
  return out;
}

}  // namespace qkin
