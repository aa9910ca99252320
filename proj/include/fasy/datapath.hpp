#pragma once

// Integer-only model of the hardware tuning pass. Every value fits in 32
// bits; the streaming kernel keeps three-row line buffers for both inputs
// and emits one output pixel per input pixel in raster order.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "fasy/error.hpp"
#include "fasy/image.hpp"
#include "fasy/tuning.hpp"

namespace fasy {

struct FixedPixel {
  std::uint8_t value = 0;
  friend bool operator==(const FixedPixel&, const FixedPixel&) = default;
};

inline constexpr std::uint32_t kMaxWindowSum = 9u * 255u;

// Worst-case rounded numerator 2*(F*CI + 2*FI*C) + (CI + 2*FI).
inline constexpr std::uint64_t kMaxRoundedNumerator =
    2ull * (255ull * kMaxWindowSum + 2ull * kMaxWindowSum * 255ull) + 3ull * kMaxWindowSum;
static_assert(kMaxRoundedNumerator < (1ull << 32), "datapath must fit 32-bit unsigned words");

struct IntBlend {
  std::uint32_t numerator = 0;    // F*CI + 2*FI*C
  std::uint32_t denominator = 0;  // CI + 2*FI
  std::uint32_t quotient = 0;     // round-half-up(numerator / denominator)
  std::uint8_t committed = 0;     // quotient clamped to [0,255]
};

/// (F*CI + 2*FI*C) / (CI + 2*FI) with one rounded integer division.
inline IntBlend blend_pixel_int_terms(FixedPixel face, FixedPixel comp, std::uint32_t fi,
                                      std::uint32_t ci) {
  if (fi > kMaxWindowSum || ci > kMaxWindowSum) {
    throw Error(Errc::ValueOutOfRange, "window sum exceeds 9*255");
  }
  IntBlend b;
  b.denominator = ci + 2u * fi;
  if (b.denominator == 0) {
    throw Error(Errc::DegenerateDenominator, "CI + 2*FI == 0");
  }
  b.numerator = face.value * ci + 2u * fi * comp.value;
  b.quotient = (2u * b.numerator + b.denominator) / (2u * b.denominator);
  b.committed = static_cast<std::uint8_t>(std::min<std::uint32_t>(b.quotient, 255u));
  return b;
}

inline FixedPixel blend_pixel_int(FixedPixel face, FixedPixel comp, std::uint32_t fi,
                                  std::uint32_t ci) {
  return {blend_pixel_int_terms(face, comp, fi, ci).committed};
}

struct TraceEntry {
  int x = 0;  // row
  int y = 0;  // column
  std::uint32_t fi = 0;
  std::uint32_t ci = 0;
  std::uint32_t numerator = 0;
  std::uint32_t denominator = 0;
  std::uint32_t quotient = 0;
  std::uint8_t committed = 0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

using DatapathTrace = std::vector<TraceEntry>;

struct StreamResult {
  GrayImage image;
  DatapathTrace trace;
};

namespace detail {

class LineBuffer {
 public:
  explicit LineBuffer(int width) : rows_{std::vector<std::uint8_t>(width), std::vector<std::uint8_t>(width),
                                         std::vector<std::uint8_t>(width)} {}

  void push(std::span<const std::uint8_t> row) {
    head_ = (head_ + 1) % 3;
    std::copy(row.begin(), row.end(), rows_[head_].begin());
  }

  // age 0 = newest row, 2 = oldest
  const std::vector<std::uint8_t>& line(int age) const { return rows_[(head_ + 3 - age) % 3]; }

 private:
  std::array<std::vector<std::uint8_t>, 3> rows_;
  int head_ = 2;
};

}  // namespace detail

/**
 * Streaming integer tuning pass.
 *
 * Rows of blank and sheet arrive one at a time; row x is emitted once row
 * x+1 is buffered. Vertical 3-sums per column are formed from the line
 * buffers and slid horizontally to get the window sums.
 */
inline StreamResult stream_tune(const GrayImage& blank, const GrayImage& sheet,
                                const TuneConfig& cfg = {}) {
  if (!blank.same_shape(sheet)) {
    throw Error(Errc::DimensionMismatch, "blank face and component sheet differ in size");
  }
  const int h = blank.height();
  const int w = blank.width();
  StreamResult res;
  std::vector<std::uint8_t> out;
  out.reserve(blank.size());

  detail::LineBuffer face_lines(w);
  detail::LineBuffer sheet_lines(w);
  std::vector<std::uint32_t> face_cols(static_cast<std::size_t>(w));
  std::vector<std::uint32_t> sheet_cols(static_cast<std::size_t>(w));

  auto emit_copy = [&](int x) {
    auto row = blank.row(x);
    out.insert(out.end(), row.begin(), row.end());
  };

  // Emits row x = newest - 1 using lines aged 2, 1, 0.
  auto emit_interior = [&](int x) {
    const auto& f_mid = face_lines.line(1);
    const auto& s_mid = sheet_lines.line(1);
    for (int c = 0; c < w; ++c) {
      face_cols[c] = face_lines.line(0)[c] + face_lines.line(1)[c] + face_lines.line(2)[c];
      sheet_cols[c] = sheet_lines.line(0)[c] + sheet_lines.line(1)[c] + sheet_lines.line(2)[c];
    }
    for (int y = 0; y < w; ++y) {
      const std::uint8_t f = f_mid[y];
      const std::uint8_t s = s_mid[y];
      if (y == 0 || y == w - 1 || s <= cfg.component_threshold.value) {
        out.push_back(f);
        continue;
      }
      const std::uint32_t fi = face_cols[y - 1] + face_cols[y] + face_cols[y + 1];
      const std::uint32_t ci = sheet_cols[y - 1] + sheet_cols[y] + sheet_cols[y + 1];
      const IntBlend b = blend_pixel_int_terms({f}, {s}, fi, ci);
      res.trace.push_back({x, y, fi, ci, b.numerator, b.denominator, b.quotient, b.committed});
      out.push_back(b.committed);
    }
  };

  for (int r = 0; r < h; ++r) {
    face_lines.push(blank.row(r));
    sheet_lines.push(sheet.row(r));
    if (r == 1) emit_copy(0);
    if (r >= 2) emit_interior(r - 1);
  }
  emit_copy(h - 1);
  res.image = GrayImage(w, h, std::move(out));
  return res;
}

struct EquivalenceReport {
  int max_abs_diff = 0;
  std::size_t mismatch_count = 0;
  GrayImage diff_map;
};

inline EquivalenceReport equivalence_report(const GrayImage& golden, const GrayImage& fixed) {
  if (!golden.same_shape(fixed)) {
    throw Error(Errc::DimensionMismatch, "golden and fixed-point images differ in size");
  }
  EquivalenceReport rep;
  std::vector<std::uint8_t> diff(golden.size());
  auto g = golden.pixels();
  auto f = fixed.pixels();
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const int d = std::abs(static_cast<int>(g[i]) - static_cast<int>(f[i]));
    diff[i] = static_cast<std::uint8_t>(d);
    rep.max_abs_diff = std::max(rep.max_abs_diff, d);
    if (d != 0) ++rep.mismatch_count;
  }
  rep.diff_map = GrayImage(golden.width(), golden.height(), std::move(diff));
  return rep;
}

/// Trace as TSV with columns x, y, FI, CI, num, den, out.
inline std::string format_trace_tsv(const DatapathTrace& trace) {
  std::string out = "x\ty\tFI\tCI\tnum\tden\tout\n";
  for (const auto& e : trace) {
    out += std::to_string(e.x) + '\t' + std::to_string(e.y) + '\t' + std::to_string(e.fi) + '\t' +
           std::to_string(e.ci) + '\t' + std::to_string(e.numerator) + '\t' +
           std::to_string(e.denominator) + '\t' + std::to_string(e.committed) + '\n';
  }
  return out;
}

struct TextFlowResult {
  std::string output_text;
  GrayImage image;
  DatapathTrace trace;
};

/// Face.txt + Components.txt -> tuned intensity text, all headerless.
inline TextFlowResult run_textfile_flow(std::string_view face_text, std::string_view components_text,
                                        int w, int h, const TuneConfig& cfg = {}) {
  const GrayImage blank = read_intensity_text(face_text, w, h);
  const GrayImage sheet = read_intensity_text(components_text, w, h);
  auto streamed = stream_tune(blank, sheet, cfg);
  TextFlowResult res;
  res.output_text = write_intensity_text(streamed.image);
  res.image = std::move(streamed.image);
  res.trace = std::move(streamed.trace);
  return res;
}

}  // namespace fasy
