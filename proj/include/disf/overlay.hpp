#pragma once

#include "disf/image.hpp"
#include "disf/pipeline.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace disf {

using Rgb = std::array<std::uint8_t, 3>;

inline RawImage to_rgb(const RawImage& img) {
  if (img.channels == 3) return img;
  RawImage out(img.width, img.height, 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c) out.data[3 * p + c] = img.data[p];
  return out;
}

/// RGB copy of `img` with superpixel boundaries painted in `color` and each
/// seed pixel (if any) marked by a 3x3 dot in `seed_color`.
inline RawImage render_overlay(const RawImage& img, const LabelMap& labels, Rgb color,
                               const std::vector<Index>& seeds = {},
                               Rgb seed_color = {255, 0, 0}) {
  if (labels.rows() != img.height || labels.cols() != img.width)
    throw std::invalid_argument("render_overlay: label map and image sizes differ");
  RawImage out = to_rgb(img);
  const Mask boundary = labels_to_boundary_mask(labels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (boundary(y, x))
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = color[c];
  for (Index s : seeds) {
    const int sx = s % img.width, sy = s / img.width;
    for (int y = std::max(0, sy - 1); y <= std::min(img.height - 1, sy + 1); ++y)
      for (int x = std::max(0, sx - 1); x <= std::min(img.width - 1, sx + 1); ++x)
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = seed_color[c];
  }
  return out;
}

}  // namespace disf
