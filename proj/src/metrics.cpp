#include "disf/metrics.hpp"

#include "disf/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace disf {
namespace {

void require_same_shape(const LabelMap& seg, const LabelMap& gt, const char* what) {
  if (seg.rows() != gt.rows() || seg.cols() != gt.cols())
    throw std::invalid_argument(std::string(what) + ": segmentation is " +
                                std::to_string(seg.cols()) + "x" + std::to_string(seg.rows()) +
                                " but ground truth is " + std::to_string(gt.cols()) + "x" +
                                std::to_string(gt.rows()));
}

// Maps arbitrary label values to 0..k-1 in first-appearance order.
std::vector<std::int32_t> densify(const LabelMap& labels, std::int32_t& count) {
  std::unordered_map<std::int32_t, std::int32_t> ids;
  std::vector<std::int32_t> out(std::size_t(labels.size()));
  for (Eigen::Index p = 0; p < labels.size(); ++p) {
    auto [it, inserted] = ids.try_emplace(labels.data()[p], std::int32_t(ids.size()));
    out[std::size_t(p)] = it->second;
  }
  count = std::int32_t(ids.size());
  return out;
}

}  // namespace

double boundary_recall(const LabelMap& seg, const LabelMap& gt, int radius) {
  require_same_shape(seg, gt, "boundary_recall");
  if (radius < 0) throw std::invalid_argument("boundary_recall: negative radius");

  const Mask gt_boundary = labels_to_boundary_mask(gt);
  const Mask seg_boundary = labels_to_boundary_mask(seg);
  const Eigen::Index h = gt.rows(), w = gt.cols();

  long long total = 0, matched = 0;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!gt_boundary(y, x)) continue;
      ++total;
      const Eigen::Index y0 = std::max<Eigen::Index>(0, y - radius);
      const Eigen::Index y1 = std::min<Eigen::Index>(h - 1, y + radius);
      const Eigen::Index x0 = std::max<Eigen::Index>(0, x - radius);
      const Eigen::Index x1 = std::min<Eigen::Index>(w - 1, x + radius);
      if (seg_boundary.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1).any()) ++matched;
    }
  }
  return total == 0 ? 1.0 : double(matched) / double(total);
}

double under_segmentation_error(const LabelMap& seg, const LabelMap& gt) {
  require_same_shape(seg, gt, "under_segmentation_error");
  std::int32_t seg_count = 0, gt_count = 0;
  const auto s = densify(seg, seg_count);
  const auto g = densify(gt, gt_count);

  std::vector<long long> seg_size(std::size_t(seg_count), 0);
  // Sparse intersection table keyed by (gt segment, superpixel).
  std::unordered_map<long long, long long> overlap;
  for (std::size_t p = 0; p < s.size(); ++p) {
    ++seg_size[std::size_t(s[p])];
    ++overlap[(long long)g[p] * seg_count + s[p]];
  }

  long long leak = 0;
  for (const auto& [key, inside] : overlap) {
    const long long outside = seg_size[std::size_t(key % seg_count)] - inside;
    leak += std::min(inside, outside);
  }
  return double(leak) / double(s.size());
}

long long count_labels(const LabelMap& labels) {
  std::vector<std::int32_t> values(labels.data(), labels.data() + labels.size());
  std::sort(values.begin(), values.end());
  return std::unique(values.begin(), values.end()) - values.begin();
}

MetricResult evaluate_segmentation(const LabelMap& seg, const LabelMap& gt, int radius) {
  return {boundary_recall(seg, gt, radius), under_segmentation_error(seg, gt), count_labels(seg)};
}

}  // namespace disf
