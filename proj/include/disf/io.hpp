#pragma once

#include "disf/image.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace disf {

/// File-level failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Reads PNG, PPM (P3/P6) or PGM (P2/P5), detected from the file contents.
/// Samples with more than 8 bits are rescaled to [0, 255]; alpha is dropped.
RawImage read_image(const std::filesystem::path& path);

/// Reads a label map. Gray samples are taken verbatim (8 or 16 bit); color
/// samples are packed as (r << 16) | (g << 8) | b.
LabelMap read_label_map(const std::filesystem::path& path);

/// 8-bit PNG, gray or RGB according to img.channels.
void write_png(const std::filesystem::path& path, const RawImage& img);

/// 8-bit binary PGM (P5) or PPM (P6) according to img.channels.
void write_pnm(const std::filesystem::path& path, const RawImage& img);

/// Label map as 16-bit binary PGM (P5, maxval 65535, big-endian samples).
void write_label_pgm(const std::filesystem::path& path, const LabelMap& labels);

}  // namespace disf
