#include "qkin/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace qkin {

std::vector<ClusterElement> CumulantSpec::elements() const {
  std::vector<ClusterElement> out;
  if (cluster) out.push_back(ClusterElement::cluster(*cluster));
  for (int p : singles) out.push_back(ClusterElement::single(p));
  return out;
}

int CumulantSpec::order() const {
  return static_cast<int>(singles.size()) + (cluster ? 1 : 0);
}

std::vector<std::string> CumulantSpec::validate() const {
  std::vector<std::string> bad;
  std::set<int> seen;
  auto check = [&](int p) {
    if (p < 0 || p >= ambient) bad.push_back("particle index out of ambient range");
    if (!seen.insert(p).second) bad.push_back("particle listed twice");
  };
  if (cluster) {
    if (cluster->empty()) bad.push_back("empty aggregate");
    for (int p : *cluster) check(p);
  }
  for (int p : singles) check(p);
  if (order() == 0) bad.push_back("cumulant needs at least one element");
  return bad;
}

namespace {

Mat block_unitary(const HamiltonianSet& H, GroupDirection dir, double t, int size) {
  switch (dir) {
    case GroupDirection::forward:
      return H.propagator(size, t);
    case GroupDirection::backward:
      return H.propagator(size, -t);
    case GroupDirection::scattering:
      return H.propagator(size, -t) * H.free_propagator(size, t);
  }
  throw std::logic_error("block_unitary: bad direction");
}

}  // namespace

NBodyOperator apply_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                             const NBodyOperator& target) {
  {
    const auto bad = spec.validate();
    if (!bad.empty()) throw std::invalid_argument("apply_cumulant: " + bad.front());
  }
  if (target.particles != spec.ambient)
    throw std::invalid_argument("apply_cumulant: target must live on the ambient space");

  const auto elements = spec.elements();
  const auto partitions = enumerate_partitions(elements);

  // Unitaries are cached per sorted block support; many partitions share
  // blocks.
  std::map<std::vector<int>, Mat> embedded;
  auto embedded_unitary = [&](const std::vector<int>& support) -> const Mat& {
    auto it = embedded.find(support);
    if (it != embedded.end()) return it->second;
    const int size = static_cast<int>(support.size());
    NBodyOperator u;
    u.dim = H.model().dim;
    u.particles = size;
    u.mat = block_unitary(H, spec.direction, spec.time, size);
    Mat full = embed(u, support, spec.ambient).mat;
    return embedded.emplace(support, std::move(full)).first->second;
  };

  NBodyOperator out = NBodyOperator::zero(target.dim, spec.ambient);
  const long dim = target.space_dim();
  for (const Partition& p : partitions) {
    Mat w = Mat::Identity(dim, dim);
    for (const auto& block : p.blocks) {
      std::vector<int> support;
      for (int e : block)
        support.insert(support.end(), elements[e].particles.begin(),
                       elements[e].particles.end());
      std::sort(support.begin(), support.end());
      w = embedded_unitary(support) * w;
    }
    out.mat += p.weight() * (w * target.mat * w.adjoint());
  }
  return out;
}

namespace {

NBodyOperator embedded_cluster_target(const CumulantSpec& spec,
                                      const NBodyOperator& target_on_cluster) {
  if (!spec.cluster)
    throw std::invalid_argument("cumulant: spec carries no cluster for the target");
  if (target_on_cluster.particles != static_cast<int>(spec.cluster->size()))
    throw std::invalid_argument("cumulant: target size must match the cluster");
  return embed(target_on_cluster, *spec.cluster, spec.ambient);
}

}  // namespace

NBodyOperator forward_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                               const NBodyOperator& target_on_cluster) {
  if (spec.direction != GroupDirection::forward)
    throw std::invalid_argument("forward_cumulant: direction mismatch");
  return apply_cumulant(H, spec, embedded_cluster_target(spec, target_on_cluster));
}

NBodyOperator backward_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                                const NBodyOperator& target_on_cluster) {
  if (spec.direction != GroupDirection::backward)
    throw std::invalid_argument("backward_cumulant: direction mismatch");
  return apply_cumulant(H, spec, embedded_cluster_target(spec, target_on_cluster));
}

Mat scattering_unitary(const HamiltonianSet& H, double t, int size) {
  return H.propagator(size, -t) * H.free_propagator(size, t);
}

NBodyOperator apply_scattering_group(const HamiltonianSet& H, double t,
                                     const std::vector<int>& support,
                                     const NBodyOperator& target) {
  NBodyOperator u;
  u.dim = H.model().dim;
  u.particles = static_cast<int>(support.size());
  u.mat = scattering_unitary(H, t, u.particles);
  const Mat w = embed(u, support, target.particles).mat;
  NBodyOperator out = target;
  out.mat = w * target.mat * w.adjoint();
  return out;
}

NBodyOperator scattering_cumulant(const HamiltonianSet& H, double t,
                                  const std::vector<int>& cluster,
                                  const std::vector<int>& extras,
                                  const NBodyOperator& target) {
  CumulantSpec spec;
  spec.time = t;
  spec.direction = GroupDirection::scattering;
  spec.cluster = cluster;
  spec.singles = extras;
  spec.ambient = target.particles;
  return apply_cumulant(H, spec, target);
}

double fitted_order(const std::vector<double>& times,
                    const std::vector<double>& values, double floor) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (values[k] > floor) {
      lx.push_back(std::log(times[k]));
      ly.push_back(std::log(values[k]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  const double n = static_cast<double>(lx.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GeneratorProbeReport generator_probe(const HamiltonianSet& H,
                                     const std::vector<double>& t_list,
                                     const NBodyOperator& g1,
                                     const NBodyOperator& g2,
                                     const NBodyOperator& g3) {
  if (g1.particles != 1 || g2.particles != 2 || g3.particles != 3)
    throw std::invalid_argument("generator_probe: targets must act on 1, 2, 3 particles");
  GeneratorProbeReport report;
  report.times = t_list;

  const double eps = H.model().epsilon;
  const NBodyOperator n0_g1 = liouvillian_free(H.model(), 0, g1);
  const NBodyOperator nint_g2 = liouvillian_int(H.model(), 0, 1, g2);

  for (double t : t_list) {
    CumulantSpec s1{t, GroupDirection::forward, std::nullopt, {0}, 1};
    const Mat a1 = apply_cumulant(H, s1, g1).mat;
    report.residual1.push_back(
        operator_norm(a1 - g1.mat - t * n0_g1.mat) / t);

    CumulantSpec s2{t, GroupDirection::forward, std::nullopt, {0, 1}, 2};
    const Mat a2 = apply_cumulant(H, s2, g2).mat;
    report.residual2.push_back(
        operator_norm(a2 - t * eps * nint_g2.mat) / t);

    CumulantSpec s3{t, GroupDirection::forward, std::nullopt, {0, 1, 2}, 3};
    const Mat a3 = apply_cumulant(H, s3, g3).mat;
    report.residual3.push_back(operator_norm(a3) / t);
  }
  report.order1 = fitted_order(report.times, report.residual1);
  report.order2 = fitted_order(report.times, report.residual2);
  report.order3 = fitted_order(report.times, report.residual3);
  return report;
}

}  // namespace qkin
