#pragma once

#include "disf/image.hpp"

namespace disf {

struct MetricResult {
  double br = 0;
  double ue = 0;
  long long nf_actual = 0;
};

/// Fraction of ground-truth boundary pixels with a predicted boundary pixel
/// within Chebyshev distance `radius`. Both boundaries use the 4-adjacency
/// label-change mask. A ground truth without boundary pixels scores 1.
double boundary_recall(const LabelMap& seg, const LabelMap& gt, int radius = 2);

/// Under-segmentation error,
///   (1/|N|) * sum_g sum_{p : p & g != {}} min(|p & g|, |p \ g|),
/// over ground-truth segments g and superpixels p.
double under_segmentation_error(const LabelMap& seg, const LabelMap& gt);

/// Number of distinct labels in a map.
long long count_labels(const LabelMap& labels);

MetricResult evaluate_segmentation(const LabelMap& seg, const LabelMap& gt, int radius = 2);

}  // namespace disf
