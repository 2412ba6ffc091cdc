#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "qkin/tensor_algebra.hpp"

using namespace qkin;
using testing::random_hermitian;
using testing::random_state;

namespace {

// Independent pairing oracle: explicit index loops, no Eigen products.
Complex naive_trace_product(const Mat& a, const Mat& b) {
  Complex acc = 0.0;
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c) acc += a(r, c) * b(c, r);
  return acc;
}

// Independent operator-norm oracle: largest eigenvalue of g^H g.
double norm_via_gram(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g.adjoint() * g);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

}  // namespace

TEST_SUITE("tensor_algebra") {

TEST_CASE("particle model invariants") {
  ParticleModel m = testing::default_model();
  CHECK(m.validate().empty());

  SUBCASE("non-Hermitian kinetic rejected") {
    m.kinetic(0, 1) = Complex(0.2, 0.3);
    CHECK(!m.validate().empty());
  }
  SUBCASE("swap asymmetry rejected") {
    Mat sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    m.pair_potential = kron(sx, sz);  // Hermitian but not swap symmetric
    CHECK(!m.validate().empty());
  }
  SUBCASE("negative epsilon rejected") {
    m.epsilon = -0.5;
    CHECK(!m.validate().empty());
  }
}

TEST_CASE("embed pads with identity") {
  Mat g(2, 2);
  g << Complex(1.5), 0, 0, Complex(-0.5);
  NBodyOperator op{2, 1, g};

  const Mat id = Mat::Identity(2, 2);
  CHECK(max_abs(embed(op, {1}, 2).mat - kron(id, g)) == 0.0);
  CHECK(max_abs(embed(op, {0}, 2).mat - kron(g, id)) == 0.0);

  // Embedding on the full set is a no-op.
  std::mt19937_64 rng(11);
  NBodyOperator two{2, 2, random_hermitian(rng, 4)};
  CHECK(max_abs(embed(two, {0, 1}, 2).mat - two.mat) == 0.0);
}

TEST_CASE("embed routes tensor slots") {
  // embed(g on {0,2}) conjugated by the (1,2) exchange equals
  // embed(g on {0,1}); explicit 8x8 comparison.
  std::mt19937_64 rng(17);
  NBodyOperator g{2, 2, random_hermitian(rng, 4)};
  const NBodyOperator lhs = embed(g, {0, 2}, 3);
  const NBodyOperator rhs = permute_particles(embed(g, {0, 1}, 3), {0, 2, 1});
  CHECK(max_abs(lhs.mat - rhs.mat) < 1e-15);

  CHECK_THROWS_AS(embed(g, {0, 3}, 3), std::invalid_argument);
  CHECK_THROWS_AS(embed(g, {1, 1}, 3), std::invalid_argument);
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(23);
  const Mat a = random_hermitian(rng, 2);
  const Mat b = random_hermitian(rng, 2);
  NBodyOperator ab{2, 2, kron(a, b)};

  SUBCASE("product splits") {
    const Mat kept = partial_trace(ab, {0}).mat;
    CHECK(max_abs(kept - a * b.trace()) < 1e-14);
    const Mat other = partial_trace(ab, {1}).mat;
    CHECK(max_abs(other - b * a.trace()) < 1e-14);
  }
  SUBCASE("keeping everything is the identity") {
    CHECK(max_abs(partial_trace(ab, {0, 1}).mat - ab.mat) == 0.0);
  }
  SUBCASE("swap traces to the identity") {
    NBodyOperator sw{2, 2, swap_matrix(2)};
    CHECK(max_abs(partial_trace(sw, {0}).mat - Mat::Identity(2, 2)) == 0.0);
  }
  SUBCASE("total trace preserved") {
    NBodyOperator big{2, 3, random_hermitian(rng, 8)};
    const Complex full = big.mat.trace();
    CHECK(std::abs(partial_trace(big, {1}).mat.trace() - full) < 1e-13);
  }
  CHECK_THROWS_AS(partial_trace(ab, {2}), std::invalid_argument);
}

TEST_CASE("embed then trace over padding recovers a dimension factor") {
  std::mt19937_64 rng(31);
  NBodyOperator g{2, 2, random_hermitian(rng, 4)};
  const NBodyOperator padded = embed(g, {0, 2}, 4);
  const NBodyOperator back = partial_trace(padded, {0, 2});
  CHECK(max_abs(back.mat - 4.0 * g.mat) < 1e-13);  // d^{|Y\X|} = 2^2
}

TEST_CASE("dual pairing") {
  std::mt19937_64 rng(37);

  SUBCASE("scalar entry only") {
    ObservableSequence g = ObservableSequence::zero(2, 3);
    g.entries[0] = NBodyOperator::scalar(2, 1.0);
    StateSequence f = StateSequence::chaos(random_state(rng, 2, 0.7), 3);
    CHECK(dual_pairing(g, f) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("identity observable reads the trace") {
    ObservableSequence g = ObservableSequence::zero(2, 2);
    g.entries[1] = NBodyOperator::identity(2, 1);
    const double lambda = 0.35;
    StateSequence f = StateSequence::chaos(random_state(rng, 2, lambda), 2);
    CHECK(dual_pairing(g, f) == doctest::Approx(lambda).epsilon(1e-13));
  }
  SUBCASE("matches the naive double-loop trace") {
    ObservableSequence g = ObservableSequence::zero(2, 2);
    g.entries[2] = NBodyOperator{2, 2, random_hermitian(rng, 4)};
    StateSequence f = StateSequence::vacuum(2, 2);
    f.entries[2] = NBodyOperator{2, 2, random_hermitian(rng, 4)};
    const double expected =
        (naive_trace_product(g.entries[2].mat, f.entries[2].mat) / 2.0).real();
    const PairingReport rep = dual_pairing_report(g, f);
    CHECK(rep.value == doctest::Approx(expected).epsilon(1e-13));
    CHECK(rep.imag_residual < 1e-10);
  }
  SUBCASE("bilinear in the observable") {
    ObservableSequence g1 = testing::random_sequence(rng, 2, 3);
    ObservableSequence g2 = testing::random_sequence(rng, 2, 3);
    StateSequence f = StateSequence::chaos(random_state(rng, 2, 0.4), 3);
    const double alpha = 1.7;
    ObservableSequence mix = ObservableSequence::zero(2, 3);
    for (int s = 0; s <= 3; ++s)
      mix.entries[s].mat = alpha * g1.entries[s].mat + g2.entries[s].mat;
    CHECK(dual_pairing(mix, f) ==
          doctest::Approx(alpha * dual_pairing(g1, f) + dual_pairing(g2, f))
              .epsilon(1e-12));
  }
}

TEST_CASE("gamma norm") {
  SUBCASE("identity at n = 1") {
    ObservableSequence g = ObservableSequence::zero(2, 3);
    g.entries[1] = NBodyOperator::identity(2, 1);
    CHECK(gamma_norm(g, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("scalar entry") {
    ObservableSequence g = ObservableSequence::zero(2, 2);
    g.entries[0] = NBodyOperator::scalar(2, Complex(-2.5, 0.0));
    CHECK(gamma_norm(g, 0.3) == doctest::Approx(2.5).epsilon(1e-15));
  }
  SUBCASE("matches the Gram-eigenvalue oracle") {
    std::mt19937_64 rng(41);
    ObservableSequence g = testing::random_sequence(rng, 2, 3);
    const double gamma = 0.25;
    double expected = 0.0;
    for (int n = 0; n <= 3; ++n)
      expected = std::max(expected, std::pow(gamma, n) / factorial(n) *
                                        norm_via_gram(g.entries[n].mat));
    CHECK(gamma_norm(g, gamma) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gamma_norm(ObservableSequence::zero(2, 1), 1.5),
                  std::invalid_argument);
}

TEST_CASE("symmetry check") {
  std::mt19937_64 rng(43);
  SUBCASE("symmetrized operator passes") {
    NBodyOperator g = testing::random_observable(rng, 2, 3);
    CHECK(check_symmetry(g) < 1e-12);
  }
  SUBCASE("asymmetric product is flagged") {
    Mat a(2, 2), b(2, 2);
    a << 1, 0, 0, -1;
    b << 0, 1, 1, 0;
    NBodyOperator ab{2, 2, kron(a, b)};
    CHECK(check_symmetry(ab) > 0.5);
    // SWAP conjugation exchanges factors.
    CHECK(max_abs(permute_particles(ab, {1, 0}).mat - kron(b, a)) == 0.0);
  }
  SUBCASE("one-particle operators are trivially symmetric") {
    NBodyOperator g{2, 1, random_hermitian(rng, 2)};
    CHECK(check_symmetry(g) == 0.0);
  }
}

TEST_CASE("state sequence invariants") {
  std::mt19937_64 rng(47);
  StateSequence f = StateSequence::chaos(random_state(rng, 2, 0.3), 3);
  CHECK(f.validate().empty());
  f.entries[0].mat(0, 0) = 2.0;
  CHECK(!f.validate().empty());
}

TEST_CASE("observable sequence invariants") {
  std::mt19937_64 rng(53);
  ObservableSequence g = testing::random_sequence(rng, 2, 3);
  CHECK(g.validate().empty());
  // Break the permutation symmetry of the two-particle entry.
  g.entries[2].mat(0, 1) += Complex(0.3, 0.1);
  g.entries[2].mat(1, 0) += Complex(0.3, -0.1);
  CHECK(!g.validate().empty());
}

}  // TEST_SUITE
