#pragma once

// Random generators and structural checkers shared by the test binaries.

#include "disf/ift.hpp"
#include "disf/sampling.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace disf::testing {

/// Random Lab image. With `levels > 0`, every channel is drawn from that
/// many discrete values so that equal costs (ties) are common.
inline LabImage<double> random_lab(int w, int h, std::mt19937& rng, int levels = 0) {
  LabImage<double> img(w, h);
  std::uniform_real_distribution<double> L(0, 100), ab(-60, 60);
  std::uniform_int_distribution<int> level(0, std::max(levels - 1, 0));
  for (Index p = 0; p < img.size(); ++p) {
    if (levels > 0) {
      img.features(p, 0) = 100.0 * level(rng) / std::max(levels - 1, 1);
      img.features(p, 1) = 20.0 * level(rng);
      img.features(p, 2) = -15.0 * level(rng);
    } else {
      img.features(p, 0) = L(rng);
      img.features(p, 1) = ab(rng);
      img.features(p, 2) = ab(rng);
    }
  }
  return img;
}

/// Blocky image: a coarse random color per cell plus Gaussian noise.
inline LabImage<double> random_blocks(int w, int h, int cell, double noise, std::mt19937& rng) {
  LabImage<double> img(w, h);
  std::uniform_real_distribution<double> L(0, 100), ab(-40, 40);
  std::normal_distribution<double> n(0, noise);
  const int cw = (w + cell - 1) / cell, ch = (h + cell - 1) / cell;
  std::vector<Eigen::Vector3d> colors;
  for (int i = 0; i < cw * ch; ++i) colors.emplace_back(L(rng), ab(rng), ab(rng));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d c = colors[std::size_t((y / cell) * cw + x / cell)];
      const Index p = Index(y) * w + x;
      for (int k = 0; k < 3; ++k) img.features(p, k) = c[k] + (noise > 0 ? n(rng) : 0.0);
    }
  return img;
}

inline RawImage random_raw(int w, int h, int channels, std::mt19937& rng) {
  RawImage img(w, h, channels);
  std::uniform_int_distribution<int> v(0, 255);
  for (auto& b : img.data) b = std::uint8_t(v(rng));
  return img;
}

/// k distinct random seed pixels, identities in row-major order.
inline SeedSet random_seeds(int w, int h, int k, std::mt19937& rng) {
  std::vector<Index> all(std::size_t(w) * h);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = Index(i);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::size_t(k));
  std::sort(all.begin(), all.end());
  return SeedSet::from_pixels(all);
}

/// True when every label class is one 8-connected component.
inline bool labels_connected(const LabelMap& labels) {
  const int h = int(labels.rows()), w = int(labels.cols());
  std::vector<bool> seen(std::size_t(w) * h, false);
  std::set<std::int32_t> visited_labels;
  for (Index start = 0; start < Index(w) * h; ++start) {
    if (seen[std::size_t(start)]) continue;
    const std::int32_t l = labels.data()[start];
    if (!visited_labels.insert(l).second) return false;  // second component of l
    std::vector<Index> stack{start};
    seen[std::size_t(start)] = true;
    while (!stack.empty()) {
      const Index p = stack.back();
      stack.pop_back();
      const int px = p % w, py = p / w;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = px + dx, qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
          const Index q = Index(qy) * w + qx;
          if (!seen[std::size_t(q)] && labels.data()[q] == l) {
            seen[std::size_t(q)] = true;
            stack.push_back(q);
          }
        }
    }
  }
  return true;
}

/// Checks every structural forest invariant; returns a description of the
/// first violation, or an empty string.
template <typename Scalar>
std::string forest_violation(const Forest<Scalar>& f, const SeedSet& seeds) {
  const Index n = f.size();
  std::set<Index> seed_pixels;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Index s = seeds[k].pixel;
    seed_pixels.insert(s);
    if (f.label[s] != Index(k)) return "seed " + std::to_string(s) + " has foreign label";
    if (f.cost[s] != Scalar(0)) return "seed " + std::to_string(s) + " has non-zero cost";
    if (f.pred[s] != kNoPred) return "seed " + std::to_string(s) + " has a predecessor";
    if (f.seed_ids[k] != seeds[k].id) return "seed identity not recorded";
  }
  std::vector<Index> sizes(seeds.size(), 0);
  for (Index p = 0; p < n; ++p) {
    if (f.label[p] < 0 || f.label[p] >= Index(seeds.size())) return "pixel " + std::to_string(p) + " unlabeled";
    ++sizes[std::size_t(f.label[p])];
    if ((f.pred[p] == kNoPred) != (seed_pixels.count(p) == 1))
      return "pred NONE mismatch at " + std::to_string(p);
    if (f.pred[p] != kNoPred) {
      const int dx = std::abs(f.pred[p] % f.width - p % f.width);
      const int dy = std::abs(f.pred[p] / f.width - p / f.width);
      if (std::max(dx, dy) != 1) return "pred of " + std::to_string(p) + " not adjacent";
    }
    Index q = p;
    Index steps = 0;
    while (f.pred[q] != kNoPred) {
      if (f.label[f.pred[q]] != f.label[q]) return "label changes along pred chain";
      q = f.pred[q];
      if (++steps > n) return "pred cycle through " + std::to_string(p);
    }
    if (f.root[p] != q) return "root of " + std::to_string(p) + " is not its chain terminal";
    if (f.label[p] != f.label[q]) return "label differs from root label";
    if (!(f.cost[p] >= Scalar(0))) return "negative or NaN cost";
  }
  for (std::size_t k = 0; k < seeds.size(); ++k)
    if (f.trees[k].size != sizes[k]) return "tree size statistic mismatch";
  if (!labels_connected(f.label_map())) return "disconnected tree";
  return {};
}

}  // namespace disf::testing
