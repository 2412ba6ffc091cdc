#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "qkin/dynamics.hpp"
#include "qkin/ode.hpp"

using namespace qkin;
using testing::random_hermitian;

TEST_SUITE("dynamics") {

TEST_CASE("Hamiltonian assembly and eigendecomposition") {
  const ParticleModel m = testing::default_model(0.7);
  HamiltonianSet H(m, 3);

  // Reassembly: H_3 from embedded one- and two-body pieces.
  NBodyOperator k1{2, 1, m.kinetic};
  NBodyOperator phi{2, 2, m.pair_potential};
  Mat expect = Mat::Zero(8, 8);
  for (int i = 0; i < 3; ++i) expect += embed(k1, {i}, 3).mat;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      expect += m.epsilon * embed(phi, {i, j}, 3).mat;
  CHECK(max_abs(H.hamiltonian(3) - expect) < 1e-14);

  // Eigendecomposition reconstructs H_n.
  for (int n = 1; n <= 3; ++n) {
    const Mat rebuilt = H.eigenvectors(n) *
                        H.eigenvalues(n).cast<Complex>().asDiagonal() *
                        H.eigenvectors(n).adjoint();
    CAPTURE(n);
    CHECK(operator_norm(rebuilt - H.hamiltonian(n)) <
          1e-10 * std::max(1.0, operator_norm(H.hamiltonian(n))));
  }
}

TEST_CASE("heisenberg map") {
  std::mt19937_64 rng(101);
  const ParticleModel m = testing::default_model(0.9);
  HamiltonianSet H(m, 2);
  NBodyOperator g{2, 2, random_hermitian(rng, 4)};

  SUBCASE("t = 0 is the identity") {
    CHECK(max_abs(H.heisenberg(0.0, g).mat - g.mat) == 0.0);
  }
  SUBCASE("the Hamiltonian is stationary") {
    NBodyOperator h2{2, 2, H.hamiltonian(2)};
    CHECK(max_abs(H.heisenberg(0.8, h2).mat - h2.mat) < 1e-13);
  }
  SUBCASE("matches the adaptive commutator-flow oracle") {
    // dX/dt = i [H2, X], integrated independently at tight tolerance.
    const Mat h2 = H.hamiltonian(2);
    auto rhs = [&](const Vec& y, Vec& dy, double) {
      const Mat x = Eigen::Map<const Mat>(y.data(), 4, 4);
      const Mat d = Complex(0, 1) * (h2 * x - x * h2);
      dy = Eigen::Map<const Vec>(d.data(), 16);
    };
    const double t = 0.7;
    const Vec y0 = Eigen::Map<const Vec>(g.mat.data(), 16);
    const Vec yt = integrate_complex_ode(rhs, y0, 0.0, t, 1e-12);
    const Mat oracle = Eigen::Map<const Mat>(yt.data(), 4, 4);
    CHECK(max_abs(H.heisenberg(t, g).mat - oracle) < 1e-10);
  }
  SUBCASE("group law and isometry") {
    const NBodyOperator a = H.heisenberg(0.9, H.heisenberg(0.4, g));
    const NBodyOperator b = H.heisenberg(1.3, g);
    CHECK(operator_norm(a.mat - b.mat) < 1e-10);
    CHECK(operator_norm(b.mat) ==
          doctest::Approx(operator_norm(g.mat)).epsilon(1e-10));
    CHECK(hermiticity_defect(b.mat) < 1e-11);
  }
  SUBCASE("particle counts beyond the cache are rejected") {
    NBodyOperator big{2, 3, random_hermitian(rng, 8)};
    CHECK_THROWS_AS(H.heisenberg(0.5, big), std::out_of_range);
  }
}

TEST_CASE("schrodinger map and adjointness") {
  std::mt19937_64 rng(103);
  const ParticleModel m = testing::default_model(0.6);
  HamiltonianSet H(m, 2);

  SUBCASE("t = 0") {
    NBodyOperator f{2, 2, random_hermitian(rng, 4)};
    CHECK(max_abs(H.schrodinger(0.0, f).mat - f.mat) == 0.0);
  }
  SUBCASE("eigenprojectors are stationary") {
    Eigen::SelfAdjointEigenSolver<Mat> es(H.hamiltonian(2));
    const Vec v = es.eigenvectors().col(1);
    NBodyOperator proj{2, 2, v * v.adjoint()};
    CHECK(max_abs(H.schrodinger(1.1, proj).mat - proj.mat) < 1e-12);
  }
  SUBCASE("Tr[(G(t)g) f] = Tr[g (G(-t)f)]") {
    for (int k = 0; k < 3; ++k) {
      NBodyOperator g{2, 2, random_hermitian(rng, 4)};
      NBodyOperator f{2, 2, random_hermitian(rng, 4)};
      const Complex lhs = (H.heisenberg(0.8, g).mat * f.mat).trace();
      const Complex rhs = (g.mat * H.schrodinger(0.8, f).mat).trace();
      CHECK(std::abs(lhs - rhs) < 1e-11);
    }
  }
}

TEST_CASE("interaction-free dynamics factorizes") {
  std::mt19937_64 rng(107);
  const ParticleModel m = testing::free_model();
  HamiltonianSet H(m, 3);
  FreeFlow flow(m);

  const Mat a = random_hermitian(rng, 2);
  const Mat b = random_hermitian(rng, 2);
  const Mat c = random_hermitian(rng, 2);
  NBodyOperator prod{2, 3, kron(kron(a, b), c)};
  const double t = 0.9;

  const Mat u = flow.single(t);
  const Mat expect = kron(kron(u * a * u.adjoint(), u * b * u.adjoint()),
                          u * c * u.adjoint());
  CHECK(max_abs(H.heisenberg(t, prod).mat - expect) < 1e-10);
  CHECK(max_abs(flow.heisenberg(t, prod).mat - expect) < 1e-12);
  CHECK(max_abs(H.free_propagator(3, t) - kron(kron(u, u), u)) < 1e-13);
}

TEST_CASE("liouvillians") {
  std::mt19937_64 rng(109);
  const ParticleModel m = testing::default_model();

  SUBCASE("functions of K(i) are annihilated") {
    NBodyOperator g{2, 2, kron(m.kinetic * m.kinetic, Mat::Identity(2, 2))};
    CHECK(max_abs(liouvillian_free(m, 0, g).mat) < 1e-14);
    CHECK(max_abs(liouvillian_free(m, 0, NBodyOperator::identity(2, 2)).mat) == 0.0);
  }
  SUBCASE("self-commutator vanishes") {
    NBodyOperator phi{2, 2, m.pair_potential};
    CHECK(max_abs(liouvillian_int(m, 0, 1, phi).mat) == 0.0);
    ParticleModel zero = testing::free_model();
    NBodyOperator g{2, 2, random_hermitian(rng, 4)};
    CHECK(max_abs(liouvillian_int(zero, 0, 1, g).mat) == 0.0);
  }
  SUBCASE("matches the naive commutator") {
    NBodyOperator g{2, 2, random_hermitian(rng, 4)};
    const Mat expect =
        Complex(0, -1) * (g.mat * m.pair_potential - m.pair_potential * g.mat);
    CHECK(max_abs(liouvillian_int(m, 0, 1, g).mat - expect) < 1e-15);
  }
  SUBCASE("small-time limit of the one-particle group") {
    NBodyOperator g{2, 1, random_hermitian(rng, 2)};
    HamiltonianSet H(m, 1);
    const Mat gen = liouvillian_free(m, 0, g).mat;
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t = 1e-3 / (1 << k);
      const double err =
          operator_norm((H.heisenberg(t, g).mat - g.mat) / t - gen);
      if (k > 0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
      prev = err;
    }
  }
  SUBCASE("generator of the full group") {
    // Second-order central difference of the conjugation at t = 0 against
    // sum N_0 + eps sum N_int; the defect shrinks like t^2.
    const ParticleModel me = testing::default_model(0.8);
    HamiltonianSet H(me, 2);
    NBodyOperator g{2, 2, random_hermitian(rng, 4)};
    Mat gen = liouvillian_free(me, 0, g).mat + liouvillian_free(me, 1, g).mat +
              me.epsilon * liouvillian_int(me, 0, 1, g).mat;
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t = 1e-2 / (1 << k);
      const Mat slope = (H.heisenberg(t, g).mat - H.heisenberg(-t, g).mat) / (2 * t);
      const double err = operator_norm(slope - gen);
      if (k > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.2));
      prev = err;
    }
  }
  CHECK_THROWS_AS(liouvillian_int(m, 1, 1, NBodyOperator::identity(2, 2)),
                  std::invalid_argument);
}

}  // TEST_SUITE
