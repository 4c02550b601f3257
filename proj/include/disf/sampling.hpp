#pragma once

#include "disf/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace disf {

/// Stable seed identity, assigned once by the sampler and kept for the whole run.
using SeedId = std::int32_t;

struct Seed {
  Index pixel;
  SeedId id;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// Distinct seed pixels ordered by identity. Identities handed out by
/// grid_sample follow row-major position, so identity order and position
/// order agree for every subset.
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<Seed> seeds) : seeds_(std::move(seeds)) {
    std::sort(seeds_.begin(), seeds_.end(),
              [](const Seed& a, const Seed& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < seeds_.size(); ++i)
      if (seeds_[i].id == seeds_[i - 1].id)
        throw std::invalid_argument("SeedSet: duplicate seed identity " +
                                    std::to_string(seeds_[i].id));
    std::vector<Index> pixels = this->pixels();
    std::sort(pixels.begin(), pixels.end());
    if (std::adjacent_find(pixels.begin(), pixels.end()) != pixels.end())
      throw std::invalid_argument("SeedSet: duplicate seed pixel");
  }

  /// Seeds at the given pixels, identities 0..n-1 in the given order.
  static SeedSet from_pixels(const std::vector<Index>& pixels) {
    std::vector<Seed> seeds;
    seeds.reserve(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i)
      seeds.push_back({pixels[i], SeedId(i)});
    return SeedSet(std::move(seeds));
  }

  [[nodiscard]] std::size_t size() const { return seeds_.size(); }
  [[nodiscard]] bool empty() const { return seeds_.empty(); }
  const Seed& operator[](std::size_t i) const { return seeds_[i]; }
  [[nodiscard]] auto begin() const { return seeds_.begin(); }
  [[nodiscard]] auto end() const { return seeds_.end(); }

  [[nodiscard]] std::vector<Index> pixels() const {
    std::vector<Index> out;
    out.reserve(seeds_.size());
    for (const auto& s : seeds_) out.push_back(s.pixel);
    return out;
  }

  friend bool operator==(const SeedSet&, const SeedSet&) = default;

 private:
  std::vector<Seed> seeds_;
};

/// GRID sampling: a square lattice of stride d = sqrt(|N| / n0) whose first
/// point sits at (d/2, d/2). A lattice point (cx, cy) selects the pixel that
/// contains it, (floor(cx), floor(cy)). Each axis keeps at least one point,
/// clipped into the image.
inline SeedSet grid_sample(const PixelGraph& graph, long long n0) {
  const long long n = graph.size();
  if (n0 <= 0) throw std::invalid_argument("grid_sample: n0 must be positive");
  if (n0 > n)
    throw std::invalid_argument("grid_sample: n0 = " + std::to_string(n0) +
                                " exceeds pixel count " + std::to_string(n));

  const double stride = std::sqrt(double(n) / double(n0));
  auto axis = [stride](int extent) {
    std::vector<int> coords;
    for (long long k = 0;; ++k) {
      const double c = stride / 2.0 + double(k) * stride;
      if (k > 0 && c >= extent) break;
      const int pos = std::min(int(std::floor(c)), extent - 1);
      if (coords.empty() || coords.back() != pos) coords.push_back(pos);
      if (c >= extent) break;
    }
    return coords;
  };
  const std::vector<int> xs = axis(graph.width());
  const std::vector<int> ys = axis(graph.height());

  std::vector<Index> pixels;
  pixels.reserve(xs.size() * ys.size());
  for (int y : ys)
    for (int x : xs) pixels.push_back(Index(y) * graph.width() + x);
  return SeedSet::from_pixels(pixels);
}

/// Mean Lab distance from p to its 8-neighbors.
template <typename Scalar>
Scalar local_gradient(const LabImage<Scalar>& img, const PixelGraph& graph, Index p) {
  Scalar sum = 0;
  int count = 0;
  graph.for_each_neighbor(p, [&](Index q) {
    sum += (img.features.row(q) - img.features.row(p)).norm();
    ++count;
  });
  return count > 0 ? sum / Scalar(count) : Scalar(0);
}

/// Moves each seed to the lowest-gradient pixel within a (2r+1)^2 window.
/// The current position wins ties; otherwise the first minimum in row-major
/// window order is taken. A move onto a pixel already holding a seed is
/// skipped. Identities are preserved.
template <typename Scalar>
SeedSet perturb_to_low_gradient(const SeedSet& seeds, const LabImage<Scalar>& img,
                                int window) {
  if (window <= 0 || seeds.empty()) return seeds;
  const PixelGraph graph(img);

  std::vector<Index> occupied = seeds.pixels();
  std::sort(occupied.begin(), occupied.end());
  auto is_occupied = [&](Index p) {
    return std::binary_search(occupied.begin(), occupied.end(), p);
  };

  std::vector<Seed> moved;
  moved.reserve(seeds.size());
  for (const Seed& seed : seeds) {
    const int sx = seed.pixel % img.width;
    const int sy = seed.pixel / img.width;
    Index best = seed.pixel;
    Scalar best_grad = local_gradient(img, graph, seed.pixel);
    for (int y = std::max(0, sy - window); y <= std::min(img.height - 1, sy + window); ++y) {
      for (int x = std::max(0, sx - window); x <= std::min(img.width - 1, sx + window); ++x) {
        const Index q = Index(y) * img.width + x;
        if (q == seed.pixel || is_occupied(q)) continue;
        const Scalar g = local_gradient(img, graph, q);
        if (g < best_grad) {
          best_grad = g;
          best = q;
        }
      }
    }
    if (best != seed.pixel) {
      occupied.erase(std::lower_bound(occupied.begin(), occupied.end(), seed.pixel));
      occupied.insert(std::lower_bound(occupied.begin(), occupied.end(), best), best);
    }
    moved.push_back({best, seed.id});
  }
  return SeedSet(std::move(moved));
}

}  // namespace disf
