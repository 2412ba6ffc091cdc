#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "qkin/dual_hierarchy.hpp"

using namespace qkin;

namespace {

double sequence_distance(const ObservableSequence& a, const ObservableSequence& b) {
  double worst = 0.0;
  for (int s = 0; s <= std::min(a.truncation(), b.truncation()); ++s)
    worst = std::max(worst, operator_norm(a.entries[s].mat - b.entries[s].mat));
  return worst;
}

}  // namespace

TEST_SUITE("dual_hierarchy") {

TEST_CASE("expansion at t = 0 returns the data") {
  std::mt19937_64 rng(301);
  HamiltonianSet H(testing::default_model(0.7), 3);
  const ObservableSequence G0 = testing::random_sequence(rng, 2, 3);
  CHECK(sequence_distance(evolve_expansion(H, G0, 0.0), G0) < 1e-12);

  const ObservableSequence too_long = testing::random_sequence(rng, 2, 4);
  CHECK_THROWS_AS(evolve_expansion(H, too_long, 0.1), std::invalid_argument);
}

TEST_CASE("free dynamics is pure streaming") {
  std::mt19937_64 rng(303);
  HamiltonianSet H(testing::free_model(), 3);
  FreeFlow flow(H.model());
  const ObservableSequence G0 = testing::random_sequence(rng, 2, 3);
  const ObservableSequence Gt = evolve_expansion(H, G0, 0.8);
  for (int s = 1; s <= 3; ++s) {
    CAPTURE(s);
    CHECK(operator_norm(Gt.entries[s].mat -
                        flow.heisenberg(0.8, G0.entries[s]).mat) < 1e-11);
  }
}

TEST_CASE("expansion matches the hierarchy oracle") {
  std::mt19937_64 rng(307);
  const ObservableSequence G0 = testing::random_sequence(rng, 2, 3);
  for (double eps : {0.4, 1.0}) {
    HamiltonianSet H(testing::default_model(eps), 3);
    for (double t : {0.6, -0.6}) {
      CAPTURE(eps);
      CAPTURE(t);
      const ObservableSequence a = evolve_expansion(H, G0, t);
      const ObservableSequence b = evolve_ode_oracle(H, G0, t, 1e-12);
      CHECK(sequence_distance(a, b) < 1e-8);
    }
  }
}

TEST_CASE("ordered-tuple debug route agrees with the subset sum") {
  std::mt19937_64 rng(311);
  HamiltonianSet H(testing::default_model(0.9), 3);
  const ObservableSequence G0 = testing::random_sequence(rng, 2, 3);
  const ObservableSequence a = evolve_expansion(H, G0, 0.5);
  const ObservableSequence b = evolve_expansion_ordered(H, G0, 0.5);
  CHECK(sequence_distance(a, b) < 1e-11);
}

TEST_CASE("oracle trivia") {
  std::mt19937_64 rng(313);
  HamiltonianSet H(testing::default_model(0.8), 2);

  SUBCASE("identity entry is stationary") {
    ObservableSequence G0 = ObservableSequence::zero(2, 2);
    G0.entries[1] = NBodyOperator::identity(2, 1);
    const ObservableSequence Gt = evolve_ode_oracle(H, G0, 0.7);
    CHECK(max_abs(Gt.entries[1].mat - Mat::Identity(2, 2)) == 0.0);
  }
  SUBCASE("S = 1 reduces to the Heisenberg map") {
    ObservableSequence G0 = ObservableSequence::zero(2, 1);
    G0.entries[1] = testing::random_observable(rng, 2, 1);
    const ObservableSequence Gt = evolve_ode_oracle(H, G0, 0.9);
    CHECK(operator_norm(Gt.entries[1].mat -
                        H.heisenberg(0.9, G0.entries[1]).mat) < 1e-10);
  }
  SUBCASE("round trip returns the data") {
    const ObservableSequence G0 = testing::random_sequence(rng, 2, 2);
    const ObservableSequence there = evolve_ode_oracle(H, G0, 0.8);
    const ObservableSequence back = evolve_ode_oracle(H, there, -0.8);
    CHECK(sequence_distance(back, G0) < 1e-9);
  }
}

TEST_CASE("hierarchy residual shrinks like dt^2") {
  // Central difference of the expansion against the right-hand side of the
  // evolution equations, halving dt.
  std::mt19937_64 rng(317);
  HamiltonianSet H(testing::default_model(0.8), 2);
  const ObservableSequence G0 = testing::random_sequence(rng, 2, 2);
  const double t = 0.4;
  const ObservableSequence Gt = evolve_expansion(H, G0, t);
  const double eps = H.model().epsilon;

  auto rhs_s2 = [&](const ObservableSequence& G) {
    const Mat& h2 = H.hamiltonian(2);
    Mat out = Complex(0, -1) * (G.entries[2].mat * h2 - h2 * G.entries[2].mat);
    for (int j1 = 0; j1 < 2; ++j1) {
      const NBodyOperator lifted = embed(G.entries[1], {1 - j1}, 2);
      out += eps * liouvillian_int(H.model(), j1, 1 - j1, lifted).mat;
    }
    return out;
  };

  const Mat target = rhs_s2(Gt);
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double dt = 1e-2 / (1 << k);
    const Mat slope = (evolve_expansion(H, G0, t + dt).entries[2].mat -
                       evolve_expansion(H, G0, t - dt).entries[2].mat) /
                      (2 * dt);
    const double err = operator_norm(slope - target);
    if (k > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.25));
    prev = err;
  }
}

TEST_CASE("entries stay symmetric and Hermitian") {
  std::mt19937_64 rng(319);
  HamiltonianSet H(testing::default_model(1.0), 3);
  const ObservableSequence Gt =
      evolve_expansion(H, testing::random_sequence(rng, 2, 3), 0.7);
  for (int s = 1; s <= 3; ++s) {
    CAPTURE(s);
    CHECK(check_symmetry(Gt.entries[s]) < 1e-10);
    CHECK(hermiticity_defect(Gt.entries[s].mat) < 1e-10);
  }
}

TEST_CASE("additive shortcut") {
  std::mt19937_64 rng(323);
  const NBodyOperator g1 = testing::random_observable(rng, 2, 1);

  SUBCASE("s = 1 is the one-particle group") {
    HamiltonianSet H(testing::default_model(0.8), 2);
    CHECK(operator_norm(additive_evolve(H, g1, 1, 0.6).mat -
                        H.heisenberg(0.6, g1).mat) < 1e-13);
  }
  SUBCASE("free dynamics kills s >= 2") {
    HamiltonianSet H(testing::free_model(), 3);
    CHECK(operator_norm(additive_evolve(H, g1, 2, 0.6).mat) < 1e-12);
    CHECK(operator_norm(additive_evolve(H, g1, 3, 0.6).mat) < 1e-12);
  }
  SUBCASE("agrees with the general expansion") {
    HamiltonianSet H(testing::default_model(0.9), 3);
    ObservableSequence G0 = ObservableSequence::zero(2, 3);
    G0.entries[1] = g1;
    const ObservableSequence Gt = evolve_expansion(H, G0, 0.55);
    for (int s = 1; s <= 3; ++s) {
      CAPTURE(s);
      CHECK(operator_norm(additive_evolve(H, g1, s, 0.55).mat -
                          Gt.entries[s].mat) < 1e-10);
    }
  }
}

TEST_CASE("mean value functional") {
  std::mt19937_64 rng(331);

  SUBCASE("vacuum state reads the scalar entry") {
    ObservableSequence G = testing::random_sequence(rng, 2, 3);
    G.entries[0] = NBodyOperator::scalar(2, Complex(1.25, 0.0));
    const StateSequence F0 = StateSequence::vacuum(2, 3);
    const MeanValueReport rep = mean_value(G, F0);
    CHECK(rep.value == doctest::Approx(1.25).epsilon(1e-14));
  }
  SUBCASE("factorized state gives a decaying tail") {
    ObservableSequence G = ObservableSequence::zero(2, 5);
    for (int s = 1; s <= 5; ++s) G.entries[s] = NBodyOperator::identity(2, s);
    const StateSequence F0 =
        StateSequence::chaos(testing::random_state(rng, 2, 0.2), 5);
    const MeanValueReport rep = mean_value(G, F0);
    for (std::size_t k = 2; k < rep.magnitudes.size(); ++k)
      CHECK(rep.magnitudes[k] < rep.magnitudes[k - 1]);
  }
  SUBCASE("two-particle-only sequences reduce to a single trace") {
    ObservableSequence G = ObservableSequence::zero(2, 3);
    G.entries[2] = NBodyOperator{2, 2, testing::random_hermitian(rng, 4)};
    StateSequence F = StateSequence::vacuum(2, 3);
    F.entries[0] = NBodyOperator::scalar(2, 0.0);
    F.entries[2] = NBodyOperator{2, 2, testing::random_hermitian(rng, 4)};
    const double expected =
        0.5 * (G.entries[2].mat * F.entries[2].mat).trace().real();
    CHECK(mean_value(G, F).value == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("duality with single-entry dynamics") {
  // For a sequence supported at one s both hierarchies reduce to the
  // s-particle conjugation, so pairing against the initial state equals
  // pairing the data against the evolved state.
  std::mt19937_64 rng(337);
  HamiltonianSet H(testing::default_model(0.8), 3);
  ObservableSequence G0 = ObservableSequence::zero(2, 3);
  G0.entries[3] = testing::random_observable(rng, 2, 3);
  StateSequence F0 = StateSequence::chaos(testing::random_state(rng, 2, 0.3), 3);

  const double t = 0.6;
  const ObservableSequence Gt = evolve_expansion(H, G0, t);
  StateSequence Ft = F0;
  for (int s = 1; s <= 3; ++s) Ft.entries[s] = H.schrodinger(t, F0.entries[s]);
  CHECK(mean_value(Gt, F0).value ==
        doctest::Approx(mean_value(G0, Ft).value).epsilon(1e-10));
}

TEST_CASE("norm bound") {
  std::mt19937_64 rng(341);
  HamiltonianSet H(testing::default_model(1.0), 3);

  SUBCASE("bound constant") {
    const ObservableSequence G0 = testing::random_sequence(rng, 2, 3);
    const BoundReport rep = verify_bound(H, G0, 0.0, 0.1);
    CHECK(rep.bound ==
          doctest::Approx(std::exp(2.0) / (1.0 - 0.1 * std::exp(1.0)))
              .epsilon(1e-15));
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ok);
  }
  SUBCASE("random sequences never violate the bound") {
    for (int seed = 0; seed < 5; ++seed) {
      std::mt19937_64 local(1000 + seed);
      const ObservableSequence G0 = testing::random_sequence(local, 2, 3);
      for (double t : {0.5, 1.0, 2.0}) {
        const BoundReport rep = verify_bound(H, G0, t, 0.1);
        CAPTURE(seed);
        CAPTURE(t);
        CHECK(rep.ok);
      }
    }
  }
  SUBCASE("gamma at or above 1/e is rejected") {
    const ObservableSequence G0 = testing::random_sequence(rng, 2, 2);
    CHECK_THROWS_AS(verify_bound(H, G0, 0.5, 0.4), std::invalid_argument);
  }
}

}  // TEST_SUITE
