#include "qkin/gke_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include <boost/rational.hpp>

namespace qkin {

std::vector<std::string> FunctionalTruncation::validate() const {
  std::vector<std::string> bad;
  if (n_max < 0 || n_max > 2) bad.push_back("n_max must lie in 0..2");
  if (s_max < 1) bad.push_back("s_max must be positive");
  if (series_cap < 0 || series_cap + 1 > 6)
    bad.push_back("series_cap must keep the expansion within 6 particles");
  if (!(lambda < std::exp(-1.0)))
    bad.push_back("lambda must stay below 1/e = 0.36787944117144233");
  if (lambda <= 0.0) bad.push_back("lambda must be positive");
  return bad;
}

namespace {

struct StageAttachment {
  int host = 0;
  std::vector<int> block;  // positions of the added particles
};

// One fully resolved term of the evolution-operator sum: a composition
// (sizes), the leftover count for the leading cumulant, and per stage the
// block-to-host attachments of the dissection.
struct VChain {
  std::vector<int> composition;
  int rem = 0;
  std::vector<std::vector<StageAttachment>> stages;
};

long long ifact(int n) {
  long long out = 1;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

double chain_weight(const VChain& c, int n) {
  const int k = static_cast<int>(c.composition.size());
  double w = (k % 2 == 0 ? 1.0 : -1.0) * factorial(n) / factorial(c.rem);
  for (const auto& stage : c.stages) {
    w /= factorial(static_cast<int>(stage.size()));
    for (const auto& att : stage) w /= factorial(static_cast<int>(att.block.size()));
  }
  return w;
}

boost::rational<long long> chain_weight_exact(const VChain& c, int n) {
  const int k = static_cast<int>(c.composition.size());
  boost::rational<long long> w(ifact(n), ifact(c.rem));
  if (k % 2 == 1) w = -w;
  for (const auto& stage : c.stages) {
    w /= ifact(static_cast<int>(stage.size()));
    for (const auto& att : stage) w /= ifact(static_cast<int>(att.block.size()));
  }
  return w;
}

// Stage options for a composition: every dissection of the newest extras
// attached injectively to the hosts available at that stage.
std::vector<std::vector<StageAttachment>> stage_options(int z_first, int z_count,
                                                        int host_count) {
  std::vector<std::vector<StageAttachment>> options;
  std::vector<int> items(z_count);
  for (int i = 0; i < z_count; ++i) items[i] = z_first + i;
  std::vector<int> hosts(host_count);
  for (int h = 0; h < host_count; ++h) hosts[h] = h;

  for (const Dissection& d : enumerate_dissections(items, host_count)) {
    const int blocks = d.block_count();
    for (const auto& tuple : injective_assignments(blocks, hosts)) {
      std::vector<StageAttachment> option(blocks);
      for (int b = 0; b < blocks; ++b) option[b] = {tuple[b], d.blocks[b]};
      options.push_back(std::move(option));
    }
  }
  return options;
}

void for_each_v_chain(int s, int n,
                      const std::function<void(const VChain&)>& visit) {
  std::vector<int> comp;
  std::function<void(int)> with_composition = [&](int used) {
    // Emit every stage-choice combination for the current composition.
    const int k = static_cast<int>(comp.size());
    VChain chain;
    chain.composition = comp;
    chain.rem = n - used;
    chain.stages.resize(k);

    std::vector<std::vector<std::vector<StageAttachment>>> options(k);
    {
      int rem_before = n;
      for (int j = 0; j < k; ++j) {
        const int rem_after = rem_before - comp[j];
        options[j] = stage_options(s + rem_after, comp[j], s + rem_after);
        rem_before = rem_after;
      }
    }
    std::function<void(int)> pick = [&](int j) {
      if (j == k) {
        visit(chain);
        return;
      }
      for (const auto& option : options[j]) {
        chain.stages[j] = option;
        pick(j + 1);
      }
    };
    pick(0);

    for (int next = 1; used + next <= n; ++next) {
      comp.push_back(next);
      with_composition(used + next);
      comp.pop_back();
    }
  };
  with_composition(0);
  // Note: compositions are grown depth-first, so the empty composition (the
  // bare leading cumulant) is emitted first.
}

std::vector<int> range_vector(int first, int count) {
  std::vector<int> out(count);
  for (int i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

NBodyOperator apply_singles_cumulant(const HamiltonianSet& H, double t,
                                     GroupDirection dir, std::vector<int> singles,
                                     const NBodyOperator& target) {
  CumulantSpec spec;
  spec.time = t;
  spec.direction = dir;
  std::sort(singles.begin(), singles.end());
  spec.singles = std::move(singles);
  spec.ambient = target.particles;
  return apply_cumulant(H, spec, target);
}

Mat tensor_power(const Mat& f, int count) {
  Mat out = Mat::Identity(1, 1);
  for (int i = 0; i < count; ++i) out = kron(out, f);
  return out;
}

}  // namespace

NBodyOperator evolution_operator(const HamiltonianSet& H, double t, int s, int n,
                                 const NBodyOperator& target) {
  if (n < 0 || n > 2)
    throw std::invalid_argument("evolution_operator: order capped at n <= 2");
  if (s < 1) throw std::invalid_argument("evolution_operator: empty cluster");
  if (target.particles < s + n)
    throw std::invalid_argument("evolution_operator: target too small for s+n");

  NBodyOperator result = NBodyOperator::zero(target.dim, target.particles);
  for_each_v_chain(s, n, [&](const VChain& chain) {
    NBodyOperator x = target;
    // Stage 1 acts first and the leading cumulant last; this order is the one
    // the cluster-expansion identity confirms (the reversed order already
    // fails at third order on one cluster particle). Blocks within a stage
    // commute.
    for (const auto& stage : chain.stages) {
      for (const auto& att : stage) {
        std::vector<int> singles = att.block;
        singles.push_back(att.host);
        x = apply_singles_cumulant(H, t, GroupDirection::scattering,
                                   std::move(singles), x);
      }
    }
    CumulantSpec lead;
    lead.time = t;
    lead.direction = GroupDirection::scattering;
    lead.cluster = range_vector(0, s);
    lead.singles = range_vector(s, chain.rem);
    lead.ambient = x.particles;
    x = apply_cumulant(H, lead, x);
    result.mat += chain_weight(chain, n) * x.mat;
  });
  return result;
}

std::vector<NBodyOperator> marginal_functional_terms(
    const HamiltonianSet& H, double t, int s, const Mat& f1_t,
    const FunctionalTruncation& trunc) {
  {
    const auto bad = trunc.validate();
    if (!bad.empty())
      throw std::invalid_argument("marginal_functional: " + bad.front());
  }
  const int d = H.model().dim;
  std::vector<NBodyOperator> terms;
  for (int n = 0; n <= trunc.n_max; ++n) {
    NBodyOperator prod{d, s + n, tensor_power(f1_t, s + n)};
    const NBodyOperator applied = evolution_operator(H, t, s, n, prod);
    NBodyOperator term = partial_trace(applied, range_vector(0, s));
    term.mat /= factorial(n);
    terms.push_back(std::move(term));
  }
  return terms;
}

NBodyOperator marginal_functional(const HamiltonianSet& H, double t, int s,
                                  const Mat& f1_t,
                                  const FunctionalTruncation& trunc) {
  const auto terms = marginal_functional_terms(H, t, s, f1_t, trunc);
  NBodyOperator out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) out.mat += terms[i].mat;
  return out;
}

F1SeriesResult f1_series(const HamiltonianSet& H, const Mat& f1_0, double t,
                         int series_cap) {
  const double e_inv = std::exp(-1.0);
  if (!(trace_norm(f1_0) < e_inv))
    throw std::invalid_argument(
        "f1_series: the driving state needs trace norm below 1/e");
  if (series_cap + 1 > H.max_particles())
    throw std::invalid_argument("f1_series: cache too small for the cap");

  const int d = H.model().dim;
  F1SeriesResult out;
  out.value = Mat::Zero(d, d);
  for (int n = 0; n <= series_cap; ++n) {
    NBodyOperator prod{d, n + 1, tensor_power(f1_0, n + 1)};
    const NBodyOperator applied = apply_singles_cumulant(
        H, t, GroupDirection::backward, range_vector(0, n + 1), prod);
    const Mat term = partial_trace(applied, {0}).mat / factorial(n);
    out.value += term;
    out.term_norms.push_back(trace_norm(term));
  }
  return out;
}

ClusterIdentityReport cluster_expansion_identity(const HamiltonianSet& H, int n,
                                                 double t, int s, int trials,
                                                 std::uint64_t seed) {
  if (n < 0 || n > 2)
    throw std::invalid_argument("cluster_expansion_identity: n capped at 2");
  const int d = H.model().dim;
  const int ambient = s + n;
  const long dim = ipow(d, ambient);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);

  ClusterIdentityReport report;
  report.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    Mat raw(dim, dim);
    for (long r = 0; r < dim; ++r)
      for (long c = 0; c < dim; ++c) raw(r, c) = Complex(dist(rng), dist(rng));
    NBodyOperator target{d, ambient, 0.5 * (raw + raw.adjoint())};

    // Direct backward cumulant over ({Y}, extras).
    CumulantSpec direct;
    direct.time = t;
    direct.direction = GroupDirection::backward;
    direct.cluster = range_vector(0, s);
    direct.singles = range_vector(s, n);
    direct.ambient = ambient;
    const Mat lhs = apply_cumulant(H, direct, target).mat;

    // Kinetic cluster expansion: evolution operators convolved with backward
    // sub-cumulants over dissections and single-particle flows.
    Mat rhs = Mat::Zero(dim, dim);
    for (int n1 = 0; n1 <= n; ++n1) {
      const int rem = n - n1;
      const double coeff = factorial(n) / factorial(rem);
      const std::vector<int> z = range_vector(s + rem, n1);
      const int host_count = s + rem;

      auto add_option = [&](const std::vector<StageAttachment>& option,
                            double weight) {
        NBodyOperator x = target;
        std::vector<bool> is_host(host_count, false);
        for (const auto& att : option) {
          is_host[att.host] = true;
          std::vector<int> singles = att.block;
          singles.push_back(att.host);
          x = apply_singles_cumulant(H, t, GroupDirection::backward,
                                     std::move(singles), x);
        }
        // Non-host particles ride the one-particle backward flow.
        NBodyOperator u1{d, 1, H.propagator(1, -t)};
        for (int m = 0; m < host_count; ++m) {
          if (is_host[m]) continue;
          const Mat w = embed(u1, {m}, ambient).mat;
          x.mat = w * x.mat * w.adjoint();
        }
        x = evolution_operator(H, t, s, rem, x);
        rhs += coeff * weight * x.mat;
      };

      if (n1 == 0) {
        add_option({}, 1.0);
      } else {
        for (const Dissection& diss : enumerate_dissections(z, host_count)) {
          const int blocks = diss.block_count();
          double weight = 1.0 / factorial(blocks);
          for (const auto& block : diss.blocks)
            weight /= factorial(static_cast<int>(block.size()));
          for (const auto& tuple :
               injective_assignments(blocks, range_vector(0, host_count))) {
            std::vector<StageAttachment> option(blocks);
            for (int b = 0; b < blocks; ++b)
              option[b] = {tuple[b], diss.blocks[b]};
            add_option(option, weight);
          }
        }
      }
    }
    report.max_deviation = std::max(report.max_deviation, max_abs(lhs - rhs));
  }
  return report;
}

namespace {

// Tr_2 (-N_int(1,2)) X for a two-particle X, keeping particle 1.
Mat collision_trace(const HamiltonianSet& H, const NBodyOperator& x2) {
  NBodyOperator c = liouvillian_int(H.model(), 0, 1, x2);
  c.mat = -c.mat;
  return partial_trace(c, {0}).mat;
}

}  // namespace

GkeResidualReport gke_residual(const HamiltonianSet& H, const Mat& f1_0, double t,
                               const FunctionalTruncation& trunc, double fd_step) {
  GkeResidualReport report;
  report.fd_step = fd_step;

  const auto plus = f1_series(H, f1_0, t + fd_step, trunc.series_cap);
  const auto minus = f1_series(H, f1_0, t - fd_step, trunc.series_cap);
  const Mat derivative = (plus.value - minus.value) / (2.0 * fd_step);

  const auto now = f1_series(H, f1_0, t, trunc.series_cap);
  const Mat& k = H.model().kinetic;
  Mat rhs = Complex(0, 1) * (now.value * k - k * now.value);  // -N_0 F1

  const auto functional_terms =
      marginal_functional_terms(H, t, 2, now.value, trunc);
  NBodyOperator functional = functional_terms.front();
  for (std::size_t i = 1; i < functional_terms.size(); ++i)
    functional.mat += functional_terms[i].mat;
  rhs += collision_trace(H, functional);

  report.residual = operator_norm(derivative - rhs);
  const double functional_tail = operator_norm(
      collision_trace(H, functional_terms.back()));
  report.tail_estimate = now.term_norms.back() + functional_tail;
  return report;
}

DualityReport duality_check(const HamiltonianSet& H, const ObservableSequence& G0,
                            const Mat& f1_0, double t,
                            const FunctionalTruncation& trunc) {
  DualityReport report;
  const int S = std::min(G0.truncation(), trunc.s_max);

  // Forward pipeline: evolve the observables, pair against chaos data.
  {
    const ObservableSequence Gt = evolve_expansion(H, G0, t);
    const StateSequence chaos = StateSequence::chaos(f1_0, G0.truncation());
    const PairingReport pairing = dual_pairing_report(Gt, chaos);
    report.lhs = pairing.value;
    report.lhs_terms = pairing.terms;
    report.lhs_tail = std::abs(pairing.terms.back());
  }

  // Backward pipeline: marginal functionals of the evolved one-particle
  // state, paired against the initial observables.
  const auto series = f1_series(H, f1_0, t, trunc.series_cap);
  report.rhs_terms.push_back(G0.entries[0].mat(0, 0).real());
  if (S >= 1)
    report.rhs_terms.push_back(
        (G0.entries[1].mat * series.value).trace().real());
  double functional_tail = 0.0;
  for (int s = 2; s <= S; ++s) {
    const auto terms = marginal_functional_terms(H, t, s, series.value, trunc);
    Mat functional = terms.front().mat;
    for (std::size_t i = 1; i < terms.size(); ++i) functional += terms[i].mat;
    report.rhs_terms.push_back(
        (G0.entries[s].mat * functional).trace().real() / factorial(s));
    functional_tail += std::abs((G0.entries[s].mat * terms.back().mat).trace().real()) /
                       factorial(s);
  }
  for (double v : report.rhs_terms) report.rhs += v;

  // Tail felt through the one-particle series at the s = 1 slot.
  double series_tail = 0.0;
  if (S >= 1) {
    // Rebuild the last series term alone.
    const int n = trunc.series_cap;
    NBodyOperator prod{H.model().dim, n + 1, tensor_power(f1_0, n + 1)};
    const NBodyOperator applied = apply_singles_cumulant(
        H, t, GroupDirection::backward, range_vector(0, n + 1), prod);
    const Mat last = partial_trace(applied, {0}).mat / factorial(n);
    series_tail = std::abs((G0.entries[1].mat * last).trace().real());
  }
  report.rhs_tail = series_tail + functional_tail;
  report.abs_err = std::abs(report.lhs - report.rhs);
  return report;
}

std::vector<double> additive_term_match(const HamiltonianSet& H,
                                        const NBodyOperator& g1, const Mat& f1_0,
                                        double t, int max_order) {
  std::vector<double> out;
  const int d = H.model().dim;
  for (int p = 1; p <= max_order; ++p) {
    const NBodyOperator forward = additive_evolve(H, g1, p, t);
    const double lhs =
        (forward.mat * tensor_power(f1_0, p)).trace().real() / factorial(p);

    NBodyOperator prod{d, p, tensor_power(f1_0, p)};
    const NBodyOperator applied = apply_singles_cumulant(
        H, t, GroupDirection::backward, range_vector(0, p), prod);
    const Mat reduced = partial_trace(applied, {0}).mat / factorial(p - 1);
    const double rhs = (g1.mat * reduced).trace().real();
    out.push_back(std::abs(lhs - rhs));
  }
  return out;
}

double rational_weight_audit(int s, int n) {
  double worst = 0.0;
  for_each_v_chain(s, n, [&](const VChain& chain) {
    const double floating = chain_weight(chain, n);
    const double exact =
        boost::rational_cast<double>(chain_weight_exact(chain, n));
    worst = std::max(worst, std::abs(floating - exact));
  });
  return worst;
}

}  // namespace qkin
