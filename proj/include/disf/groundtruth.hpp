#pragma once

#include "disf/image.hpp"

namespace disf {

/// Renumbers labels to 0..k-1 in increasing order of the original values.
LabelMap densify_labels(const LabelMap& labels);

/// Converts a boundary map (non-zero = boundary) into a region label map.
/// Non-boundary pixels are grouped into 4-connected components numbered in
/// raster order of first appearance; boundary pixels then take the label of
/// the nearest region (breadth-first over 4-adjacency, earlier-numbered
/// regions winning equal distances). An all-boundary map yields one region.
LabelMap regions_from_boundary_map(const Mask& boundary);

}  // namespace disf
