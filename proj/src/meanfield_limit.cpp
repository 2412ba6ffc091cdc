#include "qkin/meanfield_limit.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "qkin/ode.hpp"

namespace qkin {

namespace {

std::vector<int> complement(int s, const std::vector<int>& subset) {
  std::vector<int> out;
  std::vector<bool> in(s, false);
  for (int p : subset) in[p] = true;
  for (int p = 0; p < s; ++p)
    if (!in[p]) out.push_back(p);
  return out;
}

// One insertion chain of the nested expansion: fixed removal sequence
// (j_1..j_n), partner choices (i_1..i_n) and times t >= t_1 >= ... >= t_n,
// evaluated right to left on the full s-particle space. alive[k] is the
// active set before insertion k+1.
Mat evaluate_chain(const FreeFlow& flow, const ParticleModel& model, int s,
                   const Mat& innermost, double t,
                   const std::vector<double>& times,
                   const std::vector<std::vector<int>>& alive,
                   const std::vector<std::pair<int, int>>& pairs) {
  const int n = static_cast<int>(times.size());
  NBodyOperator x{model.dim, s, innermost};
  {
    const Mat u = flow.partial_product(times[n - 1], alive[n], s);
    x.mat = u * x.mat * u.adjoint();
  }
  for (int k = n; k >= 1; --k) {
    x = liouvillian_int(model, pairs[k - 1].first, pairs[k - 1].second, x);
    const double upper = (k == 1) ? t : times[k - 2];
    const Mat u = flow.partial_product(upper - times[k - 1], alive[k - 1], s);
    x.mat = u * x.mat * u.adjoint();
  }
  return x.mat;
}

// Sum over all removal sequences and partner choices for the n-th term of
// the expansion at entry s, as a function of the ordered times.
Mat expansion_integrand(const FreeFlow& flow, const ParticleModel& model,
                        const ObservableSequence& g0, int s, int n, double t,
                        const std::vector<double>& times) {
  const long dim = ipow(model.dim, s);
  Mat acc = Mat::Zero(dim, dim);

  std::vector<std::vector<int>> alive(n + 1);
  std::vector<int> start(s);
  for (int p = 0; p < s; ++p) start[p] = p;
  alive[0] = start;
  std::vector<std::pair<int, int>> pairs(n);

  std::function<void(int)> descend = [&](int k) {
    if (k == n) {
      const NBodyOperator inner = embed(g0.entries[s - n], alive[n], s);
      acc += evaluate_chain(flow, model, s, inner.mat, t, times, alive, pairs);
      return;
    }
    for (int j : alive[k]) {
      for (int i : alive[k]) {
        if (i == j) continue;
        pairs[k] = {i, j};
        std::vector<int> next;
        for (int p : alive[k])
          if (p != j) next.push_back(p);
        alive[k + 1] = std::move(next);
        descend(k + 1);
      }
    }
  };
  descend(0);
  return acc;
}

void check_limit_sequence(const ParticleModel& model, const ObservableSequence& g0) {
  if (g0.dim != model.dim)
    throw std::invalid_argument("limit evolution: dimension mismatch");
}

}  // namespace

ObservableSequence limit_evolve_ode(const ParticleModel& model,
                                    const ObservableSequence& g0, double t,
                                    double tol) {
  check_limit_sequence(model, g0);
  const int S = g0.truncation();
  const int d = g0.dim;

  std::vector<long> offsets(S + 2, 0);
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    offsets[s + 1] = offsets[s] + n * n;
  }
  const long total = offsets[S + 1];
  if (total == 0) return g0;
  Vec y0(total);
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    y0.segment(offsets[s], n * n) =
        Eigen::Map<const Vec>(g0.entries[s].mat.data(), n * n);
  }

  auto rhs = [&](const Vec& y, Vec& dy, double) {
    dy.resize(total);
    for (int s = 1; s <= S; ++s) {
      const long n = ipow(d, s);
      const Mat gs = Eigen::Map<const Mat>(y.data() + offsets[s], n, n);
      NBodyOperator cur{d, s, gs};
      Mat ds = Mat::Zero(n, n);
      for (int i = 0; i < s; ++i) ds += liouvillian_free(model, i, cur).mat;
      if (s >= 2) {
        const long m = ipow(d, s - 1);
        const Mat gprev = Eigen::Map<const Mat>(y.data() + offsets[s - 1], m, m);
        NBodyOperator prev{d, s - 1, gprev};
        for (int j1 = 0; j1 < s; ++j1) {
          const NBodyOperator lifted = embed(prev, complement(s, {j1}), s);
          for (int j2 = 0; j2 < s; ++j2) {
            if (j2 == j1) continue;
            ds += liouvillian_int(model, j1, j2, lifted).mat;
          }
        }
      }
      Eigen::Map<Mat>(dy.data() + offsets[s], n, n) = ds;
    }
  };

  const Vec yt = integrate_complex_ode(rhs, y0, 0.0, t, tol);
  ObservableSequence out = ObservableSequence::zero(d, S);
  out.entries[0] = g0.entries[0];
  for (int s = 1; s <= S; ++s) {
    const long n = ipow(d, s);
    out.entries[s].mat = Eigen::Map<const Mat>(yt.data() + offsets[s], n, n);
  }
  return out;
}

ObservableSequence limit_evolve_quadrature(const ParticleModel& model,
                                           const ObservableSequence& g0,
                                           double t,
                                           const SimplexQuadrature& quad) {
  check_limit_sequence(model, g0);
  const int S = g0.truncation();
  const FreeFlow flow(model);

  ObservableSequence out = ObservableSequence::zero(g0.dim, S);
  out.entries[0] = g0.entries[0];
  for (int s = 1; s <= S; ++s) {
    if (s - 1 > quad.max_depth())
      throw std::invalid_argument(
          "limit_evolve_quadrature: entry " + std::to_string(s) +
          " needs nesting depth " + std::to_string(s - 1));
    NBodyOperator acc = flow.heisenberg(t, g0.entries[s]);
    for (int n = 1; n <= s - 1; ++n) {
      acc.mat += quad.integrate(n, t, [&](const std::vector<double>& times) {
        return expansion_integrand(flow, model, g0, s, n, t, times);
      });
    }
    out.entries[s] = acc;
  }
  return out;
}

NBodyOperator additive_limit(const ParticleModel& model, const NBodyOperator& g1,
                             int s, double t, const SimplexQuadrature& quad) {
  if (g1.particles != 1)
    throw std::invalid_argument("additive_limit: one-particle data expected");
  if (s < 1) throw std::invalid_argument("additive_limit: s must be positive");
  const FreeFlow flow(model);
  if (s == 1) return flow.heisenberg(t, g1);
  if (s - 1 > quad.max_depth())
    throw std::invalid_argument("additive_limit: nesting depth exceeded");

  ObservableSequence seq = ObservableSequence::zero(model.dim, s);
  seq.entries[1] = g1;
  const int n = s - 1;
  NBodyOperator out = NBodyOperator::zero(model.dim, s);
  out.mat = quad.integrate(n, t, [&](const std::vector<double>& times) {
    return expansion_integrand(flow, model, seq, s, n, t, times);
  });
  return out;
}

std::vector<ConvergenceRecord> meanfield_convergence(
    const ParticleModel& model, const ObservableSequence& g0,
    const std::vector<double>& eps_list, double t, double ode_tol) {
  for (std::size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1]))
      throw std::invalid_argument("meanfield_convergence: eps_list must decrease");

  const int S = g0.truncation();
  const ObservableSequence limit = limit_evolve_ode(model, g0, t, ode_tol);

  std::vector<ConvergenceRecord> records;
  std::vector<double> prev_error(S + 1, 0.0);
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const double eps = eps_list[k];
    const ParticleModel scaled = model.with_epsilon(eps);
    HamiltonianSet H(scaled, S);
    ObservableSequence G0 = g0;
    for (int s = 1; s <= S; ++s) G0.entries[s].mat *= std::pow(eps, s);
    const ObservableSequence Gt = evolve_expansion(H, G0, t);
    for (int s = 1; s <= S; ++s) {
      ConvergenceRecord rec;
      rec.epsilon = eps;
      rec.s = s;
      rec.t = t;
      rec.error = operator_norm(Gt.entries[s].mat / std::pow(eps, s) -
                                limit.entries[s].mat);
      rec.order = (k == 0 || rec.error == 0.0 || prev_error[s] == 0.0)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : std::log(prev_error[s] / rec.error) /
                            std::log(eps_list[k - 1] / eps);
      prev_error[s] = rec.error;
      records.push_back(rec);
    }
  }
  return records;
}

std::vector<FactorizationRecord> group_factorization_check(
    const ParticleModel& model, int s, double t,
    const std::vector<double>& eps_list, const NBodyOperator& g) {
  if (g.particles != s)
    throw std::invalid_argument("group_factorization_check: particle mismatch");
  const FreeFlow flow(model);
  const Mat free_side = flow.heisenberg(t, g).mat;

  std::vector<FactorizationRecord> out;
  for (double eps : eps_list) {
    HamiltonianSet H(model.with_epsilon(eps), s);
    FactorizationRecord rec;
    rec.epsilon = eps;
    rec.deviation = operator_norm(H.heisenberg(t, g).mat - free_side);
    out.push_back(rec);
  }
  return out;
}

}  // namespace qkin
