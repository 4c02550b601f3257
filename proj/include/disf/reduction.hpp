#pragma once

#include "disf/ift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace disf {

/// Symmetric, irreflexive adjacency between trees of a forest.
class TreeAdjacency {
 public:
  TreeAdjacency() = default;
  explicit TreeAdjacency(std::size_t tree_count) : neighbors_(tree_count) {}

  void add(Index a, Index b) {
    if (a == b) return;
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }

  // Sorts and removes duplicate entries; call once after all add()s.
  void finalize() {
    for (auto& list : neighbors_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  [[nodiscard]] std::size_t tree_count() const { return neighbors_.size(); }
  [[nodiscard]] const std::vector<Index>& neighbors(Index tree) const { return neighbors_[tree]; }

  [[nodiscard]] bool contains(Index a, Index b) const {
    const auto& list = neighbors_[a];
    return std::binary_search(list.begin(), list.end(), b);
  }

  /// Unordered pairs (a < b), lexicographically sorted.
  [[nodiscard]] std::vector<std::pair<Index, Index>> pairs() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index a = 0; a < Index(neighbors_.size()); ++a)
      for (Index b : neighbors_[a])
        if (a < b) out.emplace_back(a, b);
    return out;
  }

 private:
  std::vector<std::vector<Index>> neighbors_;
};

/// Pairs of trees with at least one 8-adjacent pixel pair across them.
template <typename Scalar>
TreeAdjacency tree_adjacency(const Forest<Scalar>& forest, const PixelGraph& graph) {
  TreeAdjacency adj(forest.tree_count());
  const Index n = graph.size();
  for (Index p = 0; p < n; ++p) {
    const Index lp = forest.label[p];
    // Each undirected pixel pair is seen from both sides; one side suffices.
    graph.for_each_neighbor(p, [&](Index q) {
      if (q > p && forest.label[q] != lp) adj.add(lp, forest.label[q]);
    });
  }
  adj.finalize();
  return adj;
}

/// Relevance per tree of the current forest, indexed by label.
template <typename Scalar>
struct RelevanceTable {
  std::vector<SeedId> ids;
  std::vector<Scalar> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// V(x) = |tree_x| / |N| * min over adjacent trees y of |mean_x - mean_y|.
/// A tree without neighbors is never removable: +inf.
template <typename Scalar>
Scalar relevance(const Forest<Scalar>& forest, const TreeAdjacency& adj, Index tree,
                 long long total_pixels) {
  const auto& neighbors = adj.neighbors(tree);
  if (neighbors.empty()) return kInfiniteCost<Scalar>;
  const auto mean = forest.trees[tree].mean();
  Scalar closest = kInfiniteCost<Scalar>;
  for (Index other : neighbors)
    closest = std::min(closest, (mean - forest.trees[other].mean()).norm());
  return Scalar(forest.trees[tree].size) / Scalar(total_pixels) * closest;
}

template <typename Scalar>
RelevanceTable<Scalar> relevance_table(const Forest<Scalar>& forest, const TreeAdjacency& adj) {
  RelevanceTable<Scalar> table;
  table.ids = forest.seed_ids;
  table.values.resize(forest.tree_count());
  for (Index x = 0; x < Index(forest.tree_count()); ++x)
    table.values[x] = relevance(forest, adj, x, forest.size());
  return table;
}

/// Seed count kept at iteration i: max(floor(n0 * e^-i), nf).
inline long long schedule(long long n0, long long nf, int i) {
  if (nf < 1) throw std::invalid_argument("schedule: nf must be >= 1");
  if (nf > n0)
    throw std::invalid_argument("schedule: nf = " + std::to_string(nf) + " exceeds n0 = " +
                                std::to_string(n0));
  if (i < 0) throw std::invalid_argument("schedule: negative iteration index");
  const auto decayed = static_cast<long long>(std::floor(double(n0) * std::exp(-double(i))));
  return std::max(decayed, nf);
}

/// Keeps the m most relevant seeds (ties go to the lower identity). Seed
/// positions are carried over unchanged.
template <typename Scalar>
SeedSet select_seeds(const RelevanceTable<Scalar>& relevances, const Forest<Scalar>& forest,
                     std::size_t m) {
  const std::size_t count = relevances.size();
  if (m > count)
    throw std::invalid_argument("select_seeds: m = " + std::to_string(m) +
                                " exceeds seed count " + std::to_string(count));
  if (relevances.ids.size() != count || forest.tree_count() != count)
    throw std::invalid_argument("select_seeds: relevance table does not match forest");

  std::vector<Index> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (relevances.values[a] != relevances.values[b])
      return relevances.values[a] > relevances.values[b];
    return relevances.ids[a] < relevances.ids[b];
  });

  // Tree roots are the seed pixels: a root is the unique pred-less pixel of
  // its tree.
  std::vector<Index> root_of(count, kNoPred);
  for (Index p = 0; p < forest.size(); ++p)
    if (forest.pred[p] == kNoPred) root_of[forest.label[p]] = p;

  std::vector<Seed> kept;
  kept.reserve(m);
  for (std::size_t k = 0; k < m; ++k) kept.push_back({root_of[order[k]], relevances.ids[order[k]]});
  return SeedSet(std::move(kept));
}

}  // namespace disf
