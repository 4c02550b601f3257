#include "disf/groundtruth.hpp"

#include <algorithm>
#include <deque>
#include <vector>

namespace disf {

LabelMap densify_labels(const LabelMap& labels) {
  std::vector<std::int32_t> values(labels.data(), labels.data() + labels.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  LabelMap out(labels.rows(), labels.cols());
  for (Eigen::Index p = 0; p < labels.size(); ++p)
    out.data()[p] = std::int32_t(
        std::lower_bound(values.begin(), values.end(), labels.data()[p]) - values.begin());
  return out;
}

LabelMap regions_from_boundary_map(const Mask& boundary) {
  const int h = int(boundary.rows()), w = int(boundary.cols());
  LabelMap labels = LabelMap::Constant(h, w, -1);
  constexpr int dx[4] = {0, -1, 1, 0};
  constexpr int dy[4] = {-1, 0, 0, 1};

  std::int32_t next = 0;
  std::vector<Index> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (boundary(y, x) || labels(y, x) >= 0) continue;
      labels(y, x) = next;
      stack.assign(1, Index(y) * w + x);
      while (!stack.empty()) {
        const Index p = stack.back();
        stack.pop_back();
        const int px = p % w, py = p / w;
        for (int k = 0; k < 4; ++k) {
          const int nx = px + dx[k], ny = py + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (boundary(ny, nx) || labels(ny, nx) >= 0) continue;
          labels(ny, nx) = next;
          stack.push_back(Index(ny) * w + nx);
        }
      }
      ++next;
    }
  }
  if (next == 0) return LabelMap::Zero(h, w);

  // Grow regions into boundary pixels one BFS wave at a time. Within a wave
  // a pixel takes the smallest label among its already-labeled neighbors.
  std::vector<Index> frontier;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (labels(y, x) < 0) frontier.push_back(Index(y) * w + x);
  while (!frontier.empty()) {
    std::vector<std::pair<Index, std::int32_t>> assigned;
    std::vector<Index> remaining;
    for (Index p : frontier) {
      const int px = p % w, py = p / w;
      std::int32_t best = -1;
      for (int k = 0; k < 4; ++k) {
        const int nx = px + dx[k], ny = py + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::int32_t l = labels(ny, nx);
        if (l >= 0 && (best < 0 || l < best)) best = l;
      }
      if (best >= 0)
        assigned.emplace_back(p, best);
      else
        remaining.push_back(p);
    }
    for (auto [p, l] : assigned) labels.data()[p] = l;
    frontier.swap(remaining);
  }
  return labels;
}

}  // namespace disf
