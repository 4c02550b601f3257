#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace disf {

/// Flat row-major pixel index: p = y * width + x.
using Index = std::int32_t;

/// Per-pixel integer labels, rows = height, cols = width. Row-major storage
/// makes `data()[p]` address pixel p.
using LabelMap =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary per-pixel mask, same layout as LabelMap.
using Mask =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit interleaved image with 1 (gray) or 3 (RGB) channels.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  RawImage() = default;
  RawImage(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, 0) {}

  [[nodiscard]] std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }

  [[nodiscard]] bool valid() const {
    return width >= 1 && height >= 1 && (channels == 1 || channels == 3) &&
           data.size() == pixel_count() * channels;
  }

  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  [[nodiscard]] std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// CIELAB features, one row per pixel in row-major pixel order.
template <typename Scalar>
struct LabImage {
  using Features = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, 3, 1>;

  int width = 0;
  int height = 0;
  Features features;

  LabImage() = default;
  LabImage(int w, int h) : width(w), height(h), features(Features::Zero(Index(w) * h, 3)) {}

  [[nodiscard]] Index size() const { return Index(width) * height; }

  [[nodiscard]] auto feature(Index p) const { return features.row(p).transpose(); }
  auto feature(Index p) { return features.row(p).transpose(); }
};

namespace detail {

template <typename Scalar>
Scalar srgb_to_linear(std::uint8_t v) {
  const Scalar c = Scalar(v) / Scalar(255);
  return c <= Scalar(0.04045) ? c / Scalar(12.92)
                              : std::pow((c + Scalar(0.055)) / Scalar(1.055), Scalar(2.4));
}

template <typename Scalar>
Scalar lab_f(Scalar t) {
  constexpr Scalar delta = Scalar(6) / Scalar(29);
  return t > delta * delta * delta ? std::cbrt(t)
                                   : t / (Scalar(3) * delta * delta) + Scalar(4) / Scalar(29);
}

}  // namespace detail

/// sRGB (D65) to CIELAB. Gray input is treated as three equal channels, which
/// yields a = b = 0 exactly.
template <typename Scalar = double>
LabImage<Scalar> srgb_to_lab(const RawImage& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("srgb_to_lab: channel count must be 1 or 3, got " +
                                std::to_string(img.channels));
  if (!img.valid()) throw std::invalid_argument("srgb_to_lab: malformed image");

  std::array<Scalar, 256> linear;
  for (int v = 0; v < 256; ++v) linear[v] = detail::srgb_to_linear<Scalar>(std::uint8_t(v));

  // sRGB -> XYZ rows; the white point is taken as the row sums so that
  // (255,255,255) lands on L = 100 with zero chroma.
  const Eigen::Matrix<Scalar, 3, 3> m =
      (Eigen::Matrix<Scalar, 3, 3>() << 0.4124564, 0.3575761, 0.1804375,
                                        0.2126729, 0.7151522, 0.0721750,
                                        0.0193339, 0.1191920, 0.9503041).finished();
  const Eigen::Matrix<Scalar, 3, 1> white = m.rowwise().sum();

  LabImage<Scalar> out(img.width, img.height);
  const Index n = out.size();
  for (Index p = 0; p < n; ++p) {
    const std::uint8_t* px = img.data.data() + std::size_t(p) * img.channels;
    const std::uint8_t r = px[0];
    const std::uint8_t g = img.channels == 3 ? px[1] : r;
    const std::uint8_t b = img.channels == 3 ? px[2] : r;

    Scalar fx, fy, fz;
    if (r == g && g == b) {
      fx = fy = fz = detail::lab_f(linear[r]);
    } else {
      const Eigen::Matrix<Scalar, 3, 1> rgb(linear[r], linear[g], linear[b]);
      const Eigen::Matrix<Scalar, 3, 1> xyz = (m * rgb).cwiseQuotient(white);
      fx = detail::lab_f(xyz.x());
      fy = detail::lab_f(xyz.y());
      fz = detail::lab_f(xyz.z());
    }
    out.features(p, 0) = Scalar(116) * fy - Scalar(16);
    out.features(p, 1) = Scalar(500) * (fx - fy);
    out.features(p, 2) = Scalar(200) * (fy - fz);
  }
  return out;
}

/// Fixed-capacity neighbor list returned by PixelGraph::neighbors.
struct NeighborList {
  std::array<Index, 8> items{};
  int count = 0;

  [[nodiscard]] const Index* begin() const { return items.data(); }
  [[nodiscard]] const Index* end() const { return items.data() + count; }
  [[nodiscard]] int size() const { return count; }
  Index operator[](int i) const { return items[i]; }
};

/// Implicit 8-neighborhood graph over a width x height grid.
///
/// Neighbors are always visited in row-major order of the 3x3 window around
/// the pixel (top-left first, bottom-right last, center skipped). Everything
/// that depends on tie-breaking relies on this order.
class PixelGraph {
 public:
  PixelGraph(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("PixelGraph: dimensions must be positive");
  }

  template <typename Scalar>
  explicit PixelGraph(const LabImage<Scalar>& img) : PixelGraph(img.width, img.height) {}

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] Index size() const { return Index(width_) * height_; }

  [[nodiscard]] bool contains(Index p) const { return p >= 0 && p < size(); }

  template <typename Fn>
  void for_each_neighbor(Index p, Fn&& fn) const {
    const int x = p % width_;
    const int y = p / width_;
    for (int dy = -1; dy <= 1; ++dy) {
      const int ny = y + dy;
      if (ny < 0 || ny >= height_) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        if ((dx == 0 && dy == 0) || nx < 0 || nx >= width_) continue;
        fn(Index(ny) * width_ + nx);
      }
    }
  }

  [[nodiscard]] NeighborList neighbors(Index p) const {
    if (!contains(p))
      throw std::out_of_range("PixelGraph::neighbors: pixel " + std::to_string(p) +
                              " outside " + std::to_string(width_) + "x" +
                              std::to_string(height_) + " grid");
    NeighborList out;
    for_each_neighbor(p, [&](Index q) { out.items[out.count++] = q; });
    return out;
  }

 private:
  int width_;
  int height_;
};

}  // namespace disf
