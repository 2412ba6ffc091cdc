#ifndef QKIN_CUMULANTS_HPP
#define QKIN_CUMULANTS_HPP

#include <optional>

#include "qkin/cluster_combinatorics.hpp"
#include "qkin/dynamics.hpp"

// Cumulants (semi-invariants) of the propagation groups: signed sums over set
// partitions of the element list, every block carrying the group of its joint
// support. Three families share the machinery and differ only in the block
// unitary: forward conjugation e^{itH_B}, the adjoint e^{-itH_B}, and the
// scattering combination e^{-itH_B} (x)prod e^{itK}.

namespace qkin {

enum class GroupDirection { forward, backward, scattering };

struct CumulantSpec {
  double time = 0.0;
  GroupDirection direction = GroupDirection::forward;
  std::optional<std::vector<int>> cluster;  // aggregate {Y\X}, may be absent
  std::vector<int> singles;                 // X
  int ambient = 0;                          // particles 0..ambient-1

  std::vector<ClusterElement> elements() const;
  int order() const;  // number of elements
  std::vector<std::string> validate() const;
};

// Partition sum applied to a target already living on the ambient space.
NBodyOperator apply_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                             const NBodyOperator& target_on_ambient);

// Target lives on the cluster particles and is embedded into the ambient
// space before the group actions. Requires spec.cluster.
NBodyOperator forward_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                               const NBodyOperator& target_on_cluster);
NBodyOperator backward_cumulant(const HamiltonianSet& H, const CumulantSpec& spec,
                                const NBodyOperator& target_on_cluster);

// W with scattering group action f -> W f W^dagger on `size` particles:
// W = e^{-itH_size} * (e^{itK})^(x)size.
Mat scattering_unitary(const HamiltonianSet& H, double t, int size);

// Scattering group on the listed support, identity elsewhere in the ambient.
NBodyOperator apply_scattering_group(const HamiltonianSet& H, double t,
                                     const std::vector<int>& support,
                                     const NBodyOperator& target_on_ambient);

// Cumulant of scattering groups over ({cluster}, extras...).
NBodyOperator scattering_cumulant(const HamiltonianSet& H, double t,
                                  const std::vector<int>& cluster,
                                  const std::vector<int>& extras,
                                  const NBodyOperator& target_on_ambient);

// Small-time behaviour of the first three cumulant orders on fixed targets:
// r1(t) = ||A_1(t)g - g - t N_0 g|| / t
// r2(t) = ||A_2(t)g - t eps N_int g|| / t
// r3(t) = ||A_3(t)g|| / t
// plus log-log fitted convergence orders (every residual vanishes ~ t).
struct GeneratorProbeReport {
  std::vector<double> times;
  std::vector<double> residual1, residual2, residual3;
  double order1 = 0.0, order2 = 0.0, order3 = 0.0;
};

GeneratorProbeReport generator_probe(const HamiltonianSet& H,
                                     const std::vector<double>& t_list,
                                     const NBodyOperator& g1,
                                     const NBodyOperator& g2,
                                     const NBodyOperator& g3);

// Least-squares slope of log(value) vs log(t); entries below floor are
// dropped, +inf when everything sits at the floor (identically zero probe).
double fitted_order(const std::vector<double>& times,
                    const std::vector<double>& values, double floor = 1e-14);

}  // namespace qkin

#endif  // QKIN_CUMULANTS_HPP
