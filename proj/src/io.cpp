#include "disf/io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <vector>

namespace disf {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError(path, std::string("cannot open for ") + (mode[0] == 'r' ? "reading" : "writing"));
  return f;
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

// Decoded samples before conversion to RawImage or LabelMap.
struct Samples {
  int width = 0;
  int height = 0;
  int channels = 0;
  int maxval = 255;
  std::vector<std::uint32_t> values;
};

class PnmReader {
 public:
  PnmReader(const fs::path& path, const std::vector<std::uint8_t>& bytes)
      : path_(path), bytes_(bytes) {}

  Samples read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') throw IoError(path_, "unrecognized image format");
    const char kind = char(bytes_[1]);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
      throw IoError(path_, std::string("unsupported PNM variant P") + kind);
    pos_ = 2;

    Samples s;
    s.channels = (kind == '3' || kind == '6') ? 3 : 1;
    s.width = int(number());
    s.height = int(number());
    s.maxval = int(number());
    if (s.width < 1 || s.height < 1) throw IoError(path_, "invalid dimensions");
    if (s.maxval < 1 || s.maxval > 65535) throw IoError(path_, "invalid maxval");

    const std::size_t count = std::size_t(s.width) * s.height * s.channels;
    s.values.resize(count);
    if (kind == '2' || kind == '3') {
      for (auto& v : s.values) v = std::uint32_t(number());
    } else {
      ++pos_;  // single whitespace after maxval
      const int bytes_per = s.maxval > 255 ? 2 : 1;
      if (bytes_.size() < pos_ + count * bytes_per) throw IoError(path_, "truncated pixel data");
      for (std::size_t i = 0; i < count; ++i) {
        s.values[i] = bytes_per == 1 ? bytes_[pos_ + i]
                                     : (std::uint32_t(bytes_[pos_ + 2 * i]) << 8) |
                                           bytes_[pos_ + 2 * i + 1];
      }
    }
    for (auto v : s.values)
      if (v > std::uint32_t(s.maxval)) throw IoError(path_, "sample exceeds maxval");
    return s;
  }

 private:
  long number() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw IoError(path_, "malformed PNM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1 << 30) throw IoError(path_, "PNM value out of range");
    }
    return v;
  }

  const fs::path& path_;
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

Samples read_png_samples(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError(path, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError(path, "libpng initialization failed");
  }

  Samples s;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path, "corrupt PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  s.width = int(png_get_image_width(png, info));
  s.height = int(png_get_image_height(png, info));
  s.channels = int(png_get_channels(png, info));
  const int depth = png_get_bit_depth(png, info);
  s.maxval = depth == 16 ? 65535 : 255;
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * s.height);
  rows.resize(s.height);
  for (int y = 0; y < s.height; ++y) rows[y] = buffer.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (s.channels != 1 && s.channels != 3) throw IoError(path, "unsupported PNG channel layout");
  const std::size_t count = std::size_t(s.width) * s.height * s.channels;
  s.values.resize(count);
  for (int y = 0; y < s.height; ++y) {
    const std::uint8_t* row = rows[y];
    for (std::size_t i = 0; i < std::size_t(s.width) * s.channels; ++i) {
      s.values[std::size_t(y) * s.width * s.channels + i] =
          depth == 16 ? (std::uint32_t(row[2 * i]) << 8) | row[2 * i + 1] : row[i];
    }
  }
  return s;
}

Samples read_samples(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = slurp(path);
  if (has_png_signature(bytes)) return read_png_samples(path);
  return PnmReader(path, bytes).read();
}

}  // namespace

RawImage read_image(const std::filesystem::path& path) {
  const Samples s = read_samples(path);
  RawImage img(s.width, s.height, s.channels);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    img.data[i] = s.maxval == 255
                      ? std::uint8_t(s.values[i])
                      : std::uint8_t((s.values[i] * 255u + std::uint32_t(s.maxval) / 2) / s.maxval);
  }
  return img;
}

LabelMap read_label_map(const std::filesystem::path& path) {
  const Samples s = read_samples(path);
  LabelMap labels(s.height, s.width);
  for (Eigen::Index p = 0; p < labels.size(); ++p) {
    if (s.channels == 1) {
      labels.data()[p] = std::int32_t(s.values[std::size_t(p)]);
    } else {
      const std::uint32_t* px = s.values.data() + 3 * std::size_t(p);
      labels.data()[p] = std::int32_t((px[0] << 16) | (px[1] << 8) | px[2]);
    }
  }
  return labels;
}

void write_png(const std::filesystem::path& path, const RawImage& img) {
  if (!img.valid()) throw IoError(path, "refusing to write malformed image");
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError(path, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError(path, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path, "PNG encoding failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = std::size_t(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.data.data() + stride * y));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError(path, "write failed");
}

void write_pnm(const std::filesystem::path& path, const RawImage& img) {
  if (!img.valid()) throw IoError(path, "refusing to write malformed image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << (img.channels == 3 ? "P6" : "P5") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
  if (!out) throw IoError(path, "write failed");
}

void write_label_pgm(const std::filesystem::path& path, const LabelMap& labels) {
  std::vector<char> body(std::size_t(labels.size()) * 2);
  for (Eigen::Index p = 0; p < labels.size(); ++p) {
    const std::int32_t v = labels.data()[p];
    if (v < 0 || v > 65535) throw IoError(path, "label " + std::to_string(v) + " does not fit 16 bits");
    body[2 * std::size_t(p)] = char((v >> 8) & 0xff);
    body[2 * std::size_t(p) + 1] = char(v & 0xff);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << "P5\n" << labels.cols() << ' ' << labels.rows() << "\n65535\n";
  out.write(body.data(), std::streamsize(body.size()));
  if (!out) throw IoError(path, "write failed");
}

}  // namespace disf
