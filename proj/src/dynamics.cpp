#include "qkin/dynamics.hpp"

#include <stdexcept>

namespace qkin {

namespace {

constexpr Complex kImag{0.0, 1.0};

Mat conjugate_by_eigenbasis(const Eigen::VectorXd& evals, const Mat& evecs,
                            double t, const Mat& g) {
  // e^{itH} g e^{-itH} via phase differences in the eigenbasis.
  Mat a = evecs.adjoint() * g * evecs;
  const long n = a.rows();
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c)
      a(r, c) *= std::exp(kImag * (t * (evals(r) - evals(c))));
  return evecs * a * evecs.adjoint();
}

}  // namespace

Mat assemble_hamiltonian(const ParticleModel& model, int particles) {
  const int d = model.dim;
  if (particles == 0) return Mat::Zero(1, 1);
  NBodyOperator h = NBodyOperator::zero(d, particles);
  NBodyOperator k1;
  k1.dim = d;
  k1.particles = 1;
  k1.mat = model.kinetic;
  for (int i = 0; i < particles; ++i) h.mat += embed(k1, {i}, particles).mat;
  if (particles >= 2 && model.epsilon != 0.0) {
    NBodyOperator phi;
    phi.dim = d;
    phi.particles = 2;
    phi.mat = model.pair_potential;
    for (int i = 0; i < particles; ++i)
      for (int j = i + 1; j < particles; ++j)
        h.mat += model.epsilon * embed(phi, {i, j}, particles).mat;
  }
  return h.mat;
}

HamiltonianSet::HamiltonianSet(ParticleModel model, int max_particles)
    : model_(std::move(model)), max_particles_(max_particles) {
  if (max_particles_ < 0)
    throw std::invalid_argument("HamiltonianSet: negative particle count");
  const auto bad = model_.validate();
  if (!bad.empty())
    throw std::invalid_argument("HamiltonianSet: invalid model: " + bad.front());
  for (int n = 0; n <= max_particles_; ++n) {
    hamiltonians_.push_back(assemble_hamiltonian(model_, n));
    Eigen::SelfAdjointEigenSolver<Mat> solver(hamiltonians_.back());
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("HamiltonianSet: eigendecomposition failed");
    eigenvalues_.push_back(solver.eigenvalues());
    eigenvectors_.push_back(solver.eigenvectors());
  }
}

const Mat& HamiltonianSet::hamiltonian(int n) const {
  if (n < 0 || n > max_particles_)
    throw std::out_of_range("HamiltonianSet: particle count exceeds cache");
  return hamiltonians_[n];
}

const Eigen::VectorXd& HamiltonianSet::eigenvalues(int n) const {
  if (n < 0 || n > max_particles_)
    throw std::out_of_range("HamiltonianSet: particle count exceeds cache");
  return eigenvalues_[n];
}

const Mat& HamiltonianSet::eigenvectors(int n) const {
  if (n < 0 || n > max_particles_)
    throw std::out_of_range("HamiltonianSet: particle count exceeds cache");
  return eigenvectors_[n];
}

Mat HamiltonianSet::propagator(int n, double t) const {
  if (t == 0.0) return Mat::Identity(ipow(model_.dim, n), ipow(model_.dim, n));
  const Eigen::VectorXd& evals = eigenvalues(n);
  const Mat& evecs = eigenvectors_[n];
  Vec phases(evals.size());
  for (long k = 0; k < evals.size(); ++k)
    phases(k) = std::exp(kImag * (t * evals(k)));
  return evecs * phases.asDiagonal() * evecs.adjoint();
}

Mat HamiltonianSet::free_propagator(int n, double t) const {
  if (n == 0) return Mat::Identity(1, 1);
  const Mat single = FreeFlow(model_).single(t);
  Mat out = single;
  for (int k = 1; k < n; ++k) out = kron(out, single);
  return out;
}

NBodyOperator HamiltonianSet::heisenberg(double t, const NBodyOperator& g) const {
  const int n = g.particles;
  if (n > max_particles_)
    throw std::out_of_range("heisenberg: particle count exceeds cache");
  if (n == 0 || t == 0.0) return g;
  NBodyOperator out = g;
  out.mat = conjugate_by_eigenbasis(eigenvalues_[n], eigenvectors_[n], t, g.mat);
  return out;
}

NBodyOperator HamiltonianSet::schrodinger(double t, const NBodyOperator& f) const {
  return heisenberg(-t, f);
}

NBodyOperator liouvillian_free(const ParticleModel& model, int i,
                               const NBodyOperator& g) {
  if (i < 0 || i >= g.particles)
    throw std::invalid_argument("liouvillian_free: index out of range");
  NBodyOperator k1;
  k1.dim = model.dim;
  k1.particles = 1;
  k1.mat = model.kinetic;
  const Mat k = embed(k1, {i}, g.particles).mat;
  NBodyOperator out = g;
  out.mat = -kImag * (g.mat * k - k * g.mat);
  return out;
}

NBodyOperator liouvillian_int(const ParticleModel& model, int i, int j,
                              const NBodyOperator& g) {
  if (i == j) throw std::invalid_argument("liouvillian_int: equal indices");
  if (i < 0 || j < 0 || i >= g.particles || j >= g.particles)
    throw std::invalid_argument("liouvillian_int: index out of range");
  NBodyOperator phi;
  phi.dim = model.dim;
  phi.particles = 2;
  phi.mat = model.pair_potential;
  const Mat p = embed(phi, {i, j}, g.particles).mat;
  NBodyOperator out = g;
  out.mat = -kImag * (g.mat * p - p * g.mat);
  return out;
}

FreeFlow::FreeFlow(const ParticleModel& model) : model_(model) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(model.kinetic);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("FreeFlow: eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Mat FreeFlow::single(double t) const {
  if (t == 0.0) return Mat::Identity(model_.dim, model_.dim);
  Vec phases(eigenvalues_.size());
  for (long k = 0; k < eigenvalues_.size(); ++k)
    phases(k) = std::exp(kImag * (t * eigenvalues_(k)));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

Mat FreeFlow::partial_product(double t, const std::vector<int>& slots,
                              int host_particles) const {
  std::vector<bool> active(host_particles, false);
  for (int s : slots) {
    if (s < 0 || s >= host_particles)
      throw std::invalid_argument("FreeFlow: slot out of range");
    active[s] = true;
  }
  const Mat u = single(t);
  const Mat id = Mat::Identity(model_.dim, model_.dim);
  Mat out = Mat::Identity(1, 1);
  for (int p = 0; p < host_particles; ++p) out = kron(out, active[p] ? u : id);
  return out;
}

NBodyOperator FreeFlow::heisenberg(double t, const NBodyOperator& g) const {
  if (g.particles == 0) return g;
  std::vector<int> all(g.particles);
  for (int p = 0; p < g.particles; ++p) all[p] = p;
  const Mat u = partial_product(t, all, g.particles);
  NBodyOperator out = g;
  out.mat = u * g.mat * u.adjoint();
  return out;
}

NBodyOperator FreeFlow::schrodinger(double t, const NBodyOperator& f) const {
  return heisenberg(-t, f);
}

}  // namespace qkin
