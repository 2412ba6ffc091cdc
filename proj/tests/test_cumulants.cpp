#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "qkin/cumulants.hpp"
#include "qkin/quadrature.hpp"

using namespace qkin;
using testing::random_hermitian;

namespace {

CumulantSpec forward_spec(double t, std::vector<int> cluster,
                          std::vector<int> singles, int ambient) {
  CumulantSpec s;
  s.time = t;
  s.direction = GroupDirection::forward;
  if (!cluster.empty()) s.cluster = std::move(cluster);
  s.singles = std::move(singles);
  s.ambient = ambient;
  return s;
}

}  // namespace

TEST_SUITE("cumulants") {

TEST_CASE("spec validation") {
  CumulantSpec spec;
  spec.ambient = 3;
  CHECK(!spec.validate().empty());  // no elements at all
  spec.cluster = std::vector<int>{0, 1};
  spec.singles = {1};  // overlaps the cluster
  CHECK(!spec.validate().empty());
  spec.singles = {4};  // outside the ambient
  CHECK(!spec.validate().empty());
  spec.singles = {2};
  CHECK(spec.validate().empty());
}

TEST_CASE("first order is the full group") {
  std::mt19937_64 rng(201);
  HamiltonianSet H(testing::default_model(0.8), 3);
  NBodyOperator g{2, 3, random_hermitian(rng, 8)};
  const auto spec = forward_spec(0.6, {0, 1, 2}, {}, 3);
  CHECK(max_abs(apply_cumulant(H, spec, g).mat - H.heisenberg(0.6, g).mat) <
        1e-13);
}

TEST_CASE("second order unrolls to G2 - G1 G1") {
  std::mt19937_64 rng(203);
  HamiltonianSet H(testing::default_model(1.0), 2);
  FreeFlow flow(H.model());
  NBodyOperator g{2, 2, random_hermitian(rng, 4)};
  const double t = 0.45;

  const auto spec = forward_spec(t, {}, {0, 1}, 2);
  const Mat lhs = apply_cumulant(H, spec, g).mat;
  // G1(t,0) G1(t,1) is the free two-particle conjugation.
  const Mat rhs = H.heisenberg(t, g).mat - flow.heisenberg(t, g).mat;
  CHECK(max_abs(lhs - rhs) < 1e-13);
}

TEST_CASE("degeneracy at t = 0 and for free dynamics") {
  std::mt19937_64 rng(207);
  HamiltonianSet H(testing::default_model(0.9), 5);
  HamiltonianSet Hfree(testing::free_model(0.9), 5);

  for (int n = 1; n <= 4; ++n) {
    CAPTURE(n);
    // cluster {0}, singles 1..n
    std::vector<int> singles;
    for (int k = 1; k <= n; ++k) singles.push_back(k);
    NBodyOperator target{2, n + 1, random_hermitian(rng, ipow(2, n + 1))};

    const auto at_zero = forward_spec(0.0, {0}, singles, n + 1);
    CHECK(max_abs(apply_cumulant(H, at_zero, target).mat) < 1e-12);

    const auto free_case = forward_spec(0.7, {0}, singles, n + 1);
    CHECK(max_abs(apply_cumulant(Hfree, free_case, target).mat) < 1e-11);
  }
}

TEST_CASE("order zero at t = 0 is the identity map") {
  std::mt19937_64 rng(209);
  HamiltonianSet H(testing::default_model(), 2);
  NBodyOperator g{2, 2, random_hermitian(rng, 4)};
  const auto spec = forward_spec(0.0, {0, 1}, {}, 2);
  CHECK(max_abs(apply_cumulant(H, spec, g).mat - g.mat) < 1e-12);
}

TEST_CASE("forward/backward duality under the trace") {
  std::mt19937_64 rng(211);
  HamiltonianSet H(testing::default_model(0.7), 3);
  const double t = 0.52;

  for (int trial = 0; trial < 3; ++trial) {
    NBodyOperator g{2, 3, random_hermitian(rng, 8)};
    NBodyOperator f{2, 3, random_hermitian(rng, 8)};
    CumulantSpec fw = forward_spec(t, {0, 1}, {2}, 3);
    CumulantSpec bw = fw;
    bw.direction = GroupDirection::backward;
    const Complex lhs = (apply_cumulant(H, fw, g).mat * f.mat).trace();
    const Complex rhs = (g.mat * apply_cumulant(H, bw, f).mat).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("backward cumulant trivial cases") {
  std::mt19937_64 rng(213);
  HamiltonianSet H(testing::default_model(1.0), 3);
  NBodyOperator f{2, 2, random_hermitian(rng, 4)};

  CumulantSpec bw;
  bw.time = 0.0;
  bw.direction = GroupDirection::backward;
  bw.cluster = std::vector<int>{0};
  bw.singles = {1};
  bw.ambient = 2;
  NBodyOperator f1{2, 1, random_hermitian(rng, 2)};
  CHECK(max_abs(backward_cumulant(H, bw, f1).mat) < 1e-13);

  CumulantSpec order1;
  order1.time = 0.8;
  order1.direction = GroupDirection::backward;
  order1.cluster = std::vector<int>{0, 1};
  order1.ambient = 2;
  CHECK(max_abs(backward_cumulant(H, order1, f).mat -
                H.schrodinger(0.8, f).mat) < 1e-13);
}

TEST_CASE("scattering group") {
  std::mt19937_64 rng(217);
  const double t = 0.5;

  SUBCASE("free dynamics cancels") {
    HamiltonianSet H(testing::free_model(1.0), 2);
    NBodyOperator f{2, 2, random_hermitian(rng, 4)};
    CHECK(max_abs(apply_scattering_group(H, t, {0, 1}, f).mat - f.mat) < 1e-12);
  }
  SUBCASE("one-particle scattering is the identity") {
    HamiltonianSet H(testing::default_model(1.0), 2);
    NBodyOperator f{2, 2, random_hermitian(rng, 4)};
    CHECK(max_abs(apply_scattering_group(H, t, {0}, f).mat - f.mat) < 1e-12);
    CHECK(max_abs(scattering_unitary(H, t, 1) - Mat::Identity(2, 2)) < 1e-13);
  }
  SUBCASE("matches the explicit unitary product") {
    HamiltonianSet H(testing::default_model(1.0), 2);
    NBodyOperator f{2, 2, random_hermitian(rng, 4)};
    Eigen::SelfAdjointEigenSolver<Mat> h2(H.hamiltonian(2));
    Eigen::SelfAdjointEigenSolver<Mat> k1(H.model().kinetic);
    auto expm = [](const Eigen::SelfAdjointEigenSolver<Mat>& es, double s) {
      Vec ph(es.eigenvalues().size());
      for (long i = 0; i < ph.size(); ++i)
        ph(i) = std::exp(Complex(0, s * es.eigenvalues()(i)));
      return (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint())
          .eval();
    };
    const Mat w = expm(h2, -t) * kron(expm(k1, t), expm(k1, t));
    CHECK(max_abs(apply_scattering_group(H, t, {0, 1}, f).mat -
                  w * f.mat * w.adjoint()) < 1e-12);
  }
}

TEST_CASE("scattering cumulant degeneracies") {
  std::mt19937_64 rng(219);
  HamiltonianSet H(testing::default_model(1.0), 3);
  HamiltonianSet Hfree(testing::free_model(1.0), 3);
  NBodyOperator f{2, 3, random_hermitian(rng, 8)};

  // n = 0: the scattering group itself.
  CHECK(max_abs(scattering_cumulant(H, 0.4, {0, 1}, {}, f).mat -
                apply_scattering_group(H, 0.4, {0, 1}, f).mat) < 1e-13);

  // Free interaction: all orders >= 1 vanish.
  CHECK(max_abs(scattering_cumulant(Hfree, 0.4, {0, 1}, {2}, f).mat) < 1e-12);
  // t = 0: orders >= 1 vanish.
  CHECK(max_abs(scattering_cumulant(H, 0.0, {0, 1}, {2}, f).mat) < 1e-13);
}

TEST_CASE("cumulants preserve Hermiticity") {
  std::mt19937_64 rng(223);
  HamiltonianSet H(testing::default_model(0.8), 3);
  NBodyOperator g{2, 3, random_hermitian(rng, 8)};
  const auto spec = forward_spec(0.9, {0, 1}, {2}, 3);
  CHECK(hermiticity_defect(apply_cumulant(H, spec, g).mat) < 1e-11);
}

TEST_CASE("Duhamel identity at n = 1, s = 2") {
  // A_2(t,{0},1) applied to g (x) I equals
  // eps int_0^t G_2(t-tau) N_int(0,1) G_1 G_1(tau) [g (x) I] dtau.
  std::mt19937_64 rng(227);
  const ParticleModel m = testing::default_model(0.8);
  HamiltonianSet H(m, 2);
  FreeFlow flow(m);
  NBodyOperator g1{2, 1, random_hermitian(rng, 2)};
  const double t = 0.7;

  CumulantSpec spec = forward_spec(t, {0}, {1}, 2);
  const Mat lhs = forward_cumulant(H, spec, g1).mat;

  const NBodyOperator embedded = embed(g1, {0}, 2);
  SimplexQuadrature quad(16, 1);
  const Mat rhs =
      m.epsilon *
      quad.integrate(1, t, [&](const std::vector<double>& ts) {
        const double tau = ts[0];
        NBodyOperator inner = flow.heisenberg(tau, embedded);
        inner = liouvillian_int(m, 0, 1, inner);
        return H.heisenberg(t - tau, inner).mat;
      });
  CHECK(max_abs(lhs - rhs) < 1e-8);
}

TEST_CASE("generator probes") {
  std::mt19937_64 rng(229);
  const std::vector<double> ts{1e-3, 5e-4, 2.5e-4, 1.25e-4};

  SUBCASE("interacting model scales O(t)") {
    HamiltonianSet H(testing::default_model(0.9), 3);
    const auto report = generator_probe(
        H, ts, testing::random_observable(rng, 2, 1),
        testing::random_observable(rng, 2, 2), testing::random_observable(rng, 2, 3));
    for (std::size_t k = 1; k < ts.size(); ++k) {
      CHECK(report.residual1[k - 1] / report.residual1[k] ==
            doctest::Approx(2.0).epsilon(0.15));
      CHECK(report.residual2[k - 1] / report.residual2[k] ==
            doctest::Approx(2.0).epsilon(0.15));
    }
    CHECK(report.order1 == doctest::Approx(1.0).epsilon(0.1));
    CHECK(report.order2 == doctest::Approx(1.0).epsilon(0.1));
    // Third-order cumulant shrinks at least linearly after division by t.
    CHECK(report.order3 >= 0.8);
  }
  SUBCASE("free model kills the second probe") {
    HamiltonianSet H(testing::free_model(0.9), 3);
    const auto report = generator_probe(
        H, ts, testing::random_observable(rng, 2, 1),
        testing::random_observable(rng, 2, 2), testing::random_observable(rng, 2, 3));
    // residual2 = ||A_2(t) g|| / t here; the cumulant itself sits at roundoff.
    for (std::size_t k = 0; k < ts.size(); ++k)
      CHECK(report.residual2[k] * ts[k] < 1e-13);
  }
}

}  // TEST_SUITE
