#include "qkin/cluster_combinatorics.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace qkin {

ClusterElement ClusterElement::single(int particle) {
  ClusterElement e;
  e.particles = {particle};
  e.aggregate = false;
  return e;
}

ClusterElement ClusterElement::cluster(std::vector<int> particles) {
  if (particles.empty())
    throw std::invalid_argument("ClusterElement: aggregate must be nonempty");
  std::sort(particles.begin(), particles.end());
  if (std::adjacent_find(particles.begin(), particles.end()) != particles.end())
    throw std::invalid_argument("ClusterElement: duplicate particle in aggregate");
  ClusterElement e;
  e.particles = std::move(particles);
  e.aggregate = true;
  return e;
}

namespace {

long long signed_partition_weight(int block_count) {
  long long w = 1;
  for (int k = 1; k < block_count; ++k) w *= -k;
  return w;  // (-1)^(b-1) (b-1)!
}

// Restricted-growth enumeration: element i joins an existing block or opens a
// new one; blocks end up ordered by their smallest element index.
void enumerate_block_assignments(
    int count, int cap,
    const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
  std::vector<std::vector<int>> blocks;
  std::function<void(int)> recurse = [&](int i) {
    if (i == count) {
      visit(blocks);
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(i);
      recurse(i + 1);
      blocks[b].pop_back();
    }
    if (static_cast<int>(blocks.size()) < cap) {
      blocks.push_back({i});
      recurse(i + 1);
      blocks.pop_back();
    }
  };
  recurse(0);
}

}  // namespace

std::vector<Partition> enumerate_partitions(
    const std::vector<ClusterElement>& ground) {
  if (ground.empty())
    throw std::invalid_argument("enumerate_partitions: empty ground set");
  for (std::size_t i = 0; i < ground.size(); ++i)
    for (std::size_t j = i + 1; j < ground.size(); ++j)
      if (ground[i] == ground[j])
        throw std::invalid_argument("enumerate_partitions: duplicate element");

  std::vector<Partition> out;
  enumerate_block_assignments(
      static_cast<int>(ground.size()), static_cast<int>(ground.size()),
      [&](const std::vector<std::vector<int>>& blocks) {
        Partition p;
        p.blocks = blocks;
        p.signed_weight = signed_partition_weight(static_cast<int>(blocks.size()));
        out.push_back(std::move(p));
      });
  return out;
}

std::vector<Dissection> enumerate_dissections(const std::vector<int>& items,
                                              int cap) {
  if (items.empty())
    throw std::invalid_argument("enumerate_dissections: empty ordered set");
  if (cap < 1) throw std::invalid_argument("enumerate_dissections: cap < 1");

  std::vector<Dissection> out;
  enumerate_block_assignments(
      static_cast<int>(items.size()), cap,
      [&](const std::vector<std::vector<int>>& blocks) {
        Dissection d;
        for (const auto& block : blocks) {
          std::vector<int> values;
          values.reserve(block.size());
          for (int idx : block) values.push_back(items[idx]);
          d.blocks.push_back(std::move(values));
        }
        out.push_back(std::move(d));
      });
  return out;
}

std::vector<std::vector<int>> injective_assignments(
    int m, const std::vector<int>& hosts) {
  if (m < 0) throw std::invalid_argument("injective_assignments: m < 0");
  std::vector<std::vector<int>> out;
  if (m > static_cast<int>(hosts.size())) return out;
  std::vector<int> tuple;
  std::vector<bool> used(hosts.size(), false);
  std::function<void()> recurse = [&]() {
    if (static_cast<int>(tuple.size()) == m) {
      out.push_back(tuple);
      return;
    }
    for (std::size_t h = 0; h < hosts.size(); ++h) {
      if (used[h]) continue;
      used[h] = true;
      tuple.push_back(hosts[h]);
      recurse();
      tuple.pop_back();
      used[h] = false;
    }
  };
  recurse();
  return out;
}

std::vector<std::vector<int>> subsets_of_size(int universe, int n) {
  std::vector<std::vector<int>> out;
  if (n < 0 || n > universe) return out;
  std::vector<int> pick;
  std::function<void(int)> recurse = [&](int next) {
    if (static_cast<int>(pick.size()) == n) {
      out.push_back(pick);
      return;
    }
    const int needed = n - static_cast<int>(pick.size());
    for (int v = next; v <= universe - needed; ++v) {
      pick.push_back(v);
      recurse(v + 1);
      pick.pop_back();
    }
  };
  recurse(0);
  return out;
}

}  // namespace qkin
