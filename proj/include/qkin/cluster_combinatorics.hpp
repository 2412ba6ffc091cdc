#ifndef QKIN_CLUSTER_COMBINATORICS_HPP
#define QKIN_CLUSTER_COMBINATORICS_HPP

#include <string>
#include <vector>

// Set partitions over mixed element lists (single particles plus one optional
// aggregate treated as indivisible), dissections of linearly ordered sets and
// injective host assignments. All enumeration is exhaustive; weights are the
// signed factorials carried by every expansion downstream.

namespace qkin {

struct ClusterElement {
  std::vector<int> particles;  // nonempty, strictly increasing
  bool aggregate = false;

  static ClusterElement single(int particle);
  static ClusterElement cluster(std::vector<int> particles);
  bool operator==(const ClusterElement& other) const = default;
};

// Partition of a ground list of elements; blocks hold indices into that list
// and appear in order of their smallest element index.
struct Partition {
  std::vector<std::vector<int>> blocks;
  long long signed_weight = 1;  // (-1)^(|P|-1) (|P|-1)!
  double weight() const { return static_cast<double>(signed_weight); }
  int block_count() const { return static_cast<int>(blocks.size()); }
};

// All set partitions of the ground list; count is the Bell number of its
// size. Throws on empty ground or duplicate elements.
std::vector<Partition> enumerate_partitions(
    const std::vector<ClusterElement>& ground);

// Decomposition of a linearly ordered set into at most `cap` nonempty blocks;
// each block lists its items in the order of Z, blocks ordered by first item.
struct Dissection {
  std::vector<std::vector<int>> blocks;
  int block_count() const { return static_cast<int>(blocks.size()); }
};

// All dissections of Z with block count <= cap. Throws on empty Z or cap < 1.
std::vector<Dissection> enumerate_dissections(const std::vector<int>& items,
                                              int cap);

// All ordered tuples of m distinct values drawn from hosts, in lexicographic
// order of host positions; empty when m exceeds hosts.size() (a vanishing
// sum, not an error).
std::vector<std::vector<int>> injective_assignments(
    int m, const std::vector<int>& hosts);

// All strictly increasing n-subsets of {0, ..., universe-1}.
std::vector<std::vector<int>> subsets_of_size(int universe, int n);

}  // namespace qkin

#endif  // QKIN_CLUSTER_COMBINATORICS_HPP
