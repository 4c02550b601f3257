#pragma once

#include "disf/image.hpp"
#include "disf/sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace disf {

/// Arc-weight estimators for the max-arc path cost.
enum class CostPolicy {
  /// Distance from the target feature to the running mean of the growing tree.
  DynamicMean,
  /// Distance from the target feature to the feature of the tree's root.
  StaticRoot,
};

inline const char* to_string(CostPolicy policy) {
  return policy == CostPolicy::DynamicMean ? "dynamic" : "root";
}

inline CostPolicy parse_cost_policy(const std::string& name) {
  if (name == "dynamic" || name == "mean") return CostPolicy::DynamicMean;
  if (name == "root") return CostPolicy::StaticRoot;
  throw std::invalid_argument("unknown cost policy '" + name + "' (expected dynamic|root)");
}

inline constexpr Index kNoPred = -1;

template <typename Scalar>
inline constexpr Scalar kInfiniteCost = std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
struct TreeStats {
  using Vector = Eigen::Matrix<Scalar, 3, 1>;

  Index size = 0;
  Vector color_sum = Vector::Zero();

  [[nodiscard]] Vector mean() const { return color_sum / Scalar(size); }
};

/// Optimum-path forest. Per-pixel maps are flat, row-major.
///
/// Labels are dense tree ids in [0, |S|): label k belongs to the k-th seed of
/// the seed set (identity order), and `seed_ids[k]` recovers that seed's
/// stable identity.
template <typename Scalar>
struct Forest {
  using CostMap = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using IndexMap = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

  int width = 0;
  int height = 0;
  CostMap cost;
  IndexMap pred;
  IndexMap root;
  IndexMap label;
  std::vector<TreeStats<Scalar>> trees;
  std::vector<SeedId> seed_ids;
  std::vector<std::uint8_t> conquered;

  Forest() = default;
  Forest(int w, int h, std::size_t tree_count)
      : width(w),
        height(h),
        cost(CostMap::Constant(Index(w) * h, kInfiniteCost<Scalar>)),
        pred(IndexMap::Constant(Index(w) * h, kNoPred)),
        root(IndexMap::Constant(Index(w) * h, kNoPred)),
        label(IndexMap::Constant(Index(w) * h, -1)),
        trees(tree_count),
        seed_ids(tree_count, -1),
        conquered(std::size_t(w) * h, 0) {}

  [[nodiscard]] Index size() const { return Index(width) * height; }
  [[nodiscard]] std::size_t tree_count() const { return trees.size(); }

  [[nodiscard]] LabelMap label_map() const {
    LabelMap out(height, width);
    std::copy(label.data(), label.data() + size(), out.data());
    return out;
  }
};

/// w(s, t) for the given policy.
template <typename Scalar, typename RootDerived, typename TargetDerived>
Scalar arc_weight(CostPolicy policy, const TreeStats<Scalar>& stats,
                  const Eigen::MatrixBase<RootDerived>& root_feature,
                  const Eigen::MatrixBase<TargetDerived>& target_feature) {
  if (policy == CostPolicy::StaticRoot) return (root_feature - target_feature).norm();
  return (stats.mean() - target_feature).norm();
}

/// Path extension by one arc under the max-arc cost.
template <typename Scalar>
constexpr Scalar extend_cost(Scalar path_cost, Scalar weight) {
  return std::max(path_cost, weight);
}

/// Finalizes pixel t as a member of tree `tree` (reached from `parent`, or
/// kNoPred for a root) and folds I(t) into that tree's statistics.
template <typename Scalar>
void conquer(Forest<Scalar>& forest, const LabImage<Scalar>& img, Index t, Index parent,
             Index tree, Scalar cost) {
  if (forest.conquered[t])
    throw std::logic_error("conquer: pixel " + std::to_string(t) + " finalized twice");
  forest.conquered[t] = 1;
  forest.cost[t] = cost;
  forest.pred[t] = parent;
  forest.label[t] = tree;
  forest.root[t] = parent == kNoPred ? t : forest.root[parent];

  auto& stats = forest.trees[tree];
  stats.size += 1;
  stats.color_sum += img.feature(t);
}

namespace detail {

template <typename Scalar>
struct QueueEntry {
  Scalar key;
  std::uint64_t seq;
  Index pixel;
};

// Min-heap order on (key, insertion sequence).
template <typename Scalar>
struct QueueAfter {
  bool operator()(const QueueEntry<Scalar>& a, const QueueEntry<Scalar>& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.seq > b.seq;
  }
};

struct NoVisitor {
  template <typename Scalar>
  void operator()(Index, Scalar) const {}
};

}  // namespace detail

/// Seeded Image Foresting Transform with a max-arc path cost.
///
/// Queue order is (tentative cost, insertion sequence); a queued pixel is
/// re-inserted only on a strictly lower cost, which gives it a fresh
/// sequence number. Arc weights are evaluated when the arc is relaxed, i.e.
/// right after its tail has been finalized, using the tail tree's statistics
/// at that moment. `on_finalize(pixel, cost)` is called once per pixel in
/// extraction order.
template <typename Scalar, typename Visitor = detail::NoVisitor>
Forest<Scalar> run_ift(const LabImage<Scalar>& img, const PixelGraph& graph,
                       const SeedSet& seeds, CostPolicy policy, Visitor&& on_finalize = {}) {
  if (seeds.empty()) throw std::invalid_argument("run_ift: empty seed set");
  if (graph.width() != img.width || graph.height() != img.height)
    throw std::invalid_argument("run_ift: graph and image dimensions differ");

  const Index n = graph.size();
  Forest<Scalar> forest(img.width, img.height, seeds.size());

  using Entry = detail::QueueEntry<Scalar>;
  std::vector<Entry> heap;
  heap.reserve(std::size_t(n) + seeds.size());
  std::vector<std::uint64_t> current_seq(std::size_t(n), 0);
  std::uint64_t next_seq = 1;
  const detail::QueueAfter<Scalar> after;

  auto push = [&](Index p, Scalar key) {
    current_seq[p] = next_seq;
    heap.push_back({key, next_seq++, p});
    std::push_heap(heap.begin(), heap.end(), after);
  };

  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Index p = seeds[k].pixel;
    if (!graph.contains(p))
      throw std::invalid_argument("run_ift: seed pixel " + std::to_string(p) + " out of bounds");
    forest.seed_ids[k] = seeds[k].id;
    forest.cost[p] = Scalar(0);
    forest.label[p] = Index(k);
    forest.root[p] = p;
    push(p, Scalar(0));
  }

  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), after);
    const Entry top = heap.back();
    heap.pop_back();
    const Index s = top.pixel;
    if (forest.conquered[s] || top.seq != current_seq[s]) continue;

    conquer(forest, img, s, forest.pred[s], forest.label[s], top.key);
    on_finalize(s, top.key);

    const auto& stats = forest.trees[forest.label[s]];
    const auto root_feature = img.feature(forest.root[s]);
    const Scalar cost_s = forest.cost[s];
    graph.for_each_neighbor(s, [&](Index t) {
      if (forest.conquered[t]) return;
      const Scalar candidate =
          extend_cost(cost_s, arc_weight(policy, stats, root_feature, img.feature(t)));
      if (candidate < forest.cost[t]) {
        forest.cost[t] = candidate;
        forest.pred[t] = s;
        forest.root[t] = forest.root[s];
        forest.label[t] = forest.label[s];
        push(t, candidate);
      }
    });
  }
  return forest;
}

}  // namespace disf
