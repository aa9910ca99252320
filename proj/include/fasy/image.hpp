#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fasy/error.hpp"

namespace fasy {

/**
 * Row-major 2-D raster with 0-based (row, col) indexing.
 *
 * The Tag parameter keeps grayscale images and binary masks as distinct
 * types even though both store one byte per pixel.
 */
template <typename Tag>
class Raster {
 public:
  using value_type = std::uint8_t;

  Raster() = default;

  Raster(int width, int height, value_type fill = 0) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(Errc::InvalidArgument, "raster dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    Tag::check(fill);
  }

  Raster(int width, int height, std::vector<value_type> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw Error(Errc::InvalidArgument, "raster dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(Errc::CountMismatch, "pixel count does not match width x height");
    }
    for (auto v : data_) Tag::check(v);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  value_type at(int row, int col) const {
    return data_[index(row, col)];
  }

  void set(int row, int col, value_type v) {
    Tag::check(v);
    data_[index(row, col)] = v;
  }

  std::span<const value_type> pixels() const noexcept { return data_; }
  std::span<const value_type> row(int r) const noexcept {
    return std::span<const value_type>(data_).subspan(
        static_cast<std::size_t>(r) * static_cast<std::size_t>(width_),
        static_cast<std::size_t>(width_));
  }

  bool same_shape(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }

  template <typename OtherTag>
  bool same_shape(const Raster<OtherTag>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<value_type> data_;
};

struct GrayTag {
  static constexpr void check(std::uint8_t) noexcept {}
};

struct MaskTag {
  static void check(std::uint8_t v) {
    if (v > 1) throw Error(Errc::ValueOutOfRange, "mask bits must be 0 or 1");
  }
};

/// 8-bit grayscale image.
using GrayImage = Raster<GrayTag>;

/// 0/1 mask; 1 is white background, 0 is black foreground.
using BinaryMask = Raster<MaskTag>;

/// Intensity threshold in [0,255].
struct Threshold {
  std::uint8_t value = 0;
  friend bool operator==(const Threshold&, const Threshold&) = default;
};

// ---------------------------------------------------------------------------
// PGM

namespace detail {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Returns -1 when no digits are present at the cursor.
  long read_uint() {
    skip_space_and_comments();
    long value = 0;
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) return -2;
      ++pos_;
    }
    return pos_ == start ? -1 : value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }
  bool at_end() const noexcept { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a binary (P5) or ASCII (P2) PGM with maxval <= 255.
inline GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw Error(Errc::MalformedHeader, "missing P5/P2 magic number");
  }
  const bool binary = bytes[1] == '5';
  detail::HeaderReader rd(bytes);
  rd.advance(2);
  if (!rd.at_end() && !std::isspace(rd.peek()) && rd.peek() != '#') {
    throw Error(Errc::MalformedHeader, "magic number not followed by whitespace");
  }
  const long width = rd.read_uint();
  const long height = rd.read_uint();
  const long maxval = rd.read_uint();
  if (width <= 0 || height <= 0 || maxval <= 0) {
    throw Error(Errc::MalformedHeader, "bad width, height or maxval field");
  }
  if (width * height > (1L << 28)) {
    throw Error(Errc::MalformedHeader, "image dimensions too large");
  }
  if (maxval > 255) {
    throw Error(Errc::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " exceeds 255");
  }
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> data;
  data.reserve(count);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (rd.at_end() || !std::isspace(rd.peek())) {
      throw Error(Errc::MalformedHeader, "missing whitespace after maxval");
    }
    rd.advance(1);
    if (bytes.size() - rd.pos() < count) {
      throw Error(Errc::TruncatedRaster, "expected " + std::to_string(count) + " raster bytes, got " +
                                             std::to_string(bytes.size() - rd.pos()));
    }
    auto raster = bytes.subspan(rd.pos(), count);
    for (auto v : raster) {
      if (v > maxval) throw Error(Errc::ValueOutOfRange, "raster value exceeds maxval");
      data.push_back(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = rd.read_uint();
      if (v == -1) {
        if (rd.at_end()) {
          throw Error(Errc::TruncatedRaster, "expected " + std::to_string(count) +
                                                 " samples, got " + std::to_string(i));
        }
        throw Error(Errc::NotAnInteger, "non-numeric sample in ASCII raster");
      }
      if (v < 0 || v > maxval) throw Error(Errc::ValueOutOfRange, "sample exceeds maxval");
      data.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

inline GrayImage load_pgm(std::string_view bytes) {
  return load_pgm(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

/// Canonical P5 encoding: "P5\n<w> <h>\n255\n" followed by the raw raster.
inline std::string save_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  auto px = img.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

inline GrayImage mask_to_image(const BinaryMask& mask) {
  std::vector<std::uint8_t> data(mask.pixels().begin(), mask.pixels().end());
  for (auto& v : data) v = v ? 255 : 0;
  return GrayImage(mask.width(), mask.height(), std::move(data));
}

/// Reads a mask stored as a PGM: any nonzero sample is a 1 bit.
inline BinaryMask image_to_mask(const GrayImage& img) {
  std::vector<std::uint8_t> data(img.pixels().begin(), img.pixels().end());
  for (auto& v : data) v = v ? 1 : 0;
  return BinaryMask(img.width(), img.height(), std::move(data));
}

// ---------------------------------------------------------------------------
// Binarization

/// bit = 1 where pixel >= t, else 0.
inline BinaryMask binarize(const GrayImage& img, Threshold t) {
  std::vector<std::uint8_t> bits(img.pixels().begin(), img.pixels().end());
  for (auto& v : bits) v = v >= t.value ? 1 : 0;
  return BinaryMask(img.width(), img.height(), std::move(bits));
}

namespace detail {

// Compares a/b > c/d for non-negative fractions with positive denominators.
inline bool fraction_greater(unsigned __int128 a, unsigned __int128 b, unsigned __int128 c,
                             unsigned __int128 d) {
  return a * d > c * b;
}

}  // namespace detail

/**
 * Otsu's threshold over the 256-bin histogram.
 *
 * Class 0 holds pixels < t and class 1 pixels >= t, matching binarize().
 * The between-class variance n0*n1*(mu0-mu1)^2 is compared as an exact
 * rational (n0*s1 - n1*s0)^2 / (n0*n1), so ties resolve to the smallest t
 * without floating-point noise.
 */
inline Threshold otsu_threshold(const GrayImage& img) {
  std::array<std::uint64_t, 256> hist{};
  for (auto v : img.pixels()) ++hist[v];
  if (std::count_if(hist.begin(), hist.end(), [](auto n) { return n > 0; }) < 2) {
    throw Error(Errc::DegenerateImage, "image has a single intensity");
  }

  std::uint64_t total_n = img.size();
  std::uint64_t total_s = 0;
  for (int v = 0; v < 256; ++v) total_s += hist[v] * static_cast<std::uint64_t>(v);

  // Exact arithmetic is safe up to roughly 4e5 pixels; beyond that fall back
  // to long double, where near-ties may resolve differently.
  const bool exact = total_n <= 400'000;

  std::uint64_t n0 = 0, s0 = 0;
  int best_t = 0;
  bool found = false;
  unsigned __int128 best_num = 0, best_den = 1;
  long double best_ld = -1.0L;
  for (int t = 0; t < 256; ++t) {
    // class 0 = [0, t)
    if (t > 0) {
      n0 += hist[t - 1];
      s0 += hist[t - 1] * static_cast<std::uint64_t>(t - 1);
    }
    const std::uint64_t n1 = total_n - n0;
    const std::uint64_t s1 = total_s - s0;
    if (n0 == 0 || n1 == 0) continue;
    if (exact) {
      const __int128 diff = static_cast<__int128>(n0) * s1 - static_cast<__int128>(n1) * s0;
      const unsigned __int128 mag = diff < 0 ? -diff : diff;
      const unsigned __int128 num = mag * mag;
      const unsigned __int128 den = static_cast<unsigned __int128>(n0) * n1;
      if (!found || detail::fraction_greater(num, den, best_num, best_den)) {
        best_num = num, best_den = den, best_t = t;
        found = true;
      }
    } else {
      const long double mu0 = static_cast<long double>(s0) / n0;
      const long double mu1 = static_cast<long double>(s1) / n1;
      const long double var = static_cast<long double>(n0) * n1 * (mu0 - mu1) * (mu0 - mu1);
      if (var > best_ld) best_ld = var, best_t = t;
    }
  }
  return Threshold{static_cast<std::uint8_t>(best_t)};
}

// ---------------------------------------------------------------------------
// Resize

/// Nearest-neighbour resample: out(r,c) = in(floor(r*H/h), floor(c*W/w)).
inline GrayImage resize_nearest(const GrayImage& img, int w, int h) {
  if (w < 1 || h < 1) throw Error(Errc::InvalidArgument, "target dimensions must be positive");
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    const int src_r = static_cast<int>(static_cast<long long>(r) * img.height() / h);
    for (int c = 0; c < w; ++c) {
      const int src_c = static_cast<int>(static_cast<long long>(c) * img.width() / w);
      out.set(r, c, img.at(src_r, src_c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intensity text files: headerless, one base-10 integer per line, row-major.

inline std::string write_intensity_text(const GrayImage& img) {
  std::string out;
  out.reserve(img.size() * 4);
  for (auto v : img.pixels()) {
    out += std::to_string(static_cast<int>(v));
    out += '\n';
  }
  return out;
}

inline GrayImage read_intensity_text(std::string_view text, int w, int h) {
  if (w < 1 || h < 1) throw Error(Errc::InvalidArgument, "dimensions must be positive");
  const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> data;
  data.reserve(expected);

  std::size_t pos = 0;
  std::size_t count = 0;
  while (true) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;

    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ptr != token.data() + token.size() || ec == std::errc::invalid_argument) {
      throw Error(Errc::NotAnInteger, "token '" + std::string(token) + "' at position " +
                                          std::to_string(count) + " is not an integer");
    }
    if (ec == std::errc::result_out_of_range || value < 0 || value > 255) {
      throw Error(Errc::ValueOutOfRange, "value '" + std::string(token) + "' at position " +
                                             std::to_string(count) + " is outside [0,255]");
    }
    ++count;
    if (data.size() < expected) data.push_back(static_cast<std::uint8_t>(value));
  }
  if (count != expected) {
    throw Error(Errc::CountMismatch, "expected " + std::to_string(expected) + " values, got " +
                                         std::to_string(count));
  }
  return GrayImage(w, h, std::move(data));
}

}  // namespace fasy
