#pragma once

#include "disf/ift.hpp"
#include "disf/reduction.hpp"
#include "disf/sampling.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace disf {

struct DisfParams {
  long long n0 = 8000;
  long long nf = 20;
  CostPolicy policy = CostPolicy::DynamicMean;
  /// Keep a label-map snapshot of every iteration in the trace.
  bool record_trace = false;
};

struct IterationRecord {
  int iteration = 0;
  std::size_t seed_count = 0;
  std::vector<Index> seed_pixels;
  std::optional<LabelMap> labels;
  double ift_ms = 0;
  double reduction_ms = 0;
};

struct IterationTrace {
  double sampling_ms = 0;
  std::vector<IterationRecord> iterations;

  /// Number of IFT executions.
  [[nodiscard]] std::size_t ift_runs() const { return iterations.size(); }
  [[nodiscard]] double ift_ms() const {
    double total = 0;
    for (const auto& it : iterations) total += it.ift_ms;
    return total;
  }
  [[nodiscard]] double reduction_ms() const {
    double total = 0;
    for (const auto& it : iterations) total += it.reduction_ms;
    return total;
  }
};

template <typename Scalar>
struct DisfResult {
  Forest<Scalar> forest;
  IterationTrace trace;
};

inline void validate(const DisfParams& params, long long pixel_count) {
  if (params.nf < 1) throw std::invalid_argument("nf must be >= 1");
  if (params.nf > params.n0)
    throw std::invalid_argument("nf = " + std::to_string(params.nf) + " exceeds n0 = " +
                                std::to_string(params.n0));
  if (params.n0 > pixel_count)
    throw std::invalid_argument("n0 = " + std::to_string(params.n0) + " exceeds pixel count " +
                                std::to_string(pixel_count));
}

/// Initial seeds: the GRID lattice for n0, or, when that lattice holds fewer
/// than nf points, the lattice of the smallest larger request that does.
inline SeedSet initial_seeds(const PixelGraph& graph, long long n0, long long nf) {
  SeedSet seeds = grid_sample(graph, n0);
  for (long long request = n0 + 1; (long long)seeds.size() < nf; ++request)
    seeds = grid_sample(graph, request);
  return seeds;
}

/// Oversample, then alternate delineation and relevance-based reduction
/// until exactly nf trees remain. The returned forest is the delineation of
/// the final nf seeds.
template <typename Scalar>
DisfResult<Scalar> disf_segment(const LabImage<Scalar>& img, const DisfParams& params) {
  validate(params, img.size());
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  const PixelGraph graph(img);
  DisfResult<Scalar> result;

  auto start = Clock::now();
  SeedSet seeds = initial_seeds(graph, params.n0, params.nf);
  result.trace.sampling_ms = ms_since(start);

  for (int i = 0;; ++i) {
    IterationRecord record;
    record.iteration = i;
    record.seed_count = seeds.size();
    record.seed_pixels = seeds.pixels();

    start = Clock::now();
    result.forest = run_ift(img, graph, seeds, params.policy);
    record.ift_ms = ms_since(start);
    if (params.record_trace) record.labels = result.forest.label_map();

    if ((long long)seeds.size() == params.nf) {
      result.trace.iterations.push_back(std::move(record));
      break;
    }

    start = Clock::now();
    // When the lattice held more seeds than the schedule asks for at some
    // step, skip ahead to the first step that actually removes seeds.
    long long keep = schedule(params.n0, params.nf, i + 1);
    for (int j = i + 2; keep >= (long long)seeds.size(); ++j) keep = schedule(params.n0, params.nf, j);
    const TreeAdjacency adj = tree_adjacency(result.forest, graph);
    const RelevanceTable<Scalar> relevances = relevance_table(result.forest, adj);
    seeds = select_seeds(relevances, result.forest, std::size_t(keep));
    record.reduction_ms = ms_since(start);
    result.trace.iterations.push_back(std::move(record));
  }
  return result;
}

/// Pixels having a 4-adjacent pixel with a different label.
inline Mask labels_to_boundary_mask(const LabelMap& labels) {
  const Eigen::Index h = labels.rows(), w = labels.cols();
  Mask mask = Mask::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const auto l = labels(y, x);
      if ((x > 0 && labels(y, x - 1) != l) || (x + 1 < w && labels(y, x + 1) != l) ||
          (y > 0 && labels(y - 1, x) != l) || (y + 1 < h && labels(y + 1, x) != l))
        mask(y, x) = 1;
    }
  }
  return mask;
}

template <typename Scalar>
Mask labels_to_boundary_mask(const Forest<Scalar>& forest) {
  return labels_to_boundary_mask(forest.label_map());
}

}  // namespace disf
