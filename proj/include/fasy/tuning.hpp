#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "fasy/assembler.hpp"
#include "fasy/error.hpp"
#include "fasy/image.hpp"

namespace fasy {

/// What to do when the component's 3x3 window sums to zero.
enum class ZeroCiPolicy { CopyComponent, LeaveFace };

struct TuneConfig {
  Threshold component_threshold{0};
  ZeroCiPolicy zero_ci_policy = ZeroCiPolicy::LeaveFace;
};

/// Neighbourhood sums, intensity factor and blended value for one pixel.
struct BlendTerms {
  double fi = 0.0;
  double ci = 0.0;
  double intensity_factor = 0.0;  // fi / ci, 0 when ci == 0
  double out = 0.0;
};

inline bool window_inside(int height, int width, int r, int c) noexcept {
  return r >= 1 && c >= 1 && r <= height - 2 && c <= width - 2;
}

/// Sum of the nine intensities centred on (r, c).
inline double neighborhood_sum(const GrayImage& img, int r, int c) {
  if (!window_inside(img.height(), img.width(), r, c)) {
    throw Error(Errc::WindowOutOfBounds, "3x3 window at (" + std::to_string(r) + "," +
                                             std::to_string(c) + ") leaves the image");
  }
  unsigned sum = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) sum += img.at(r + dr, c + dc);
  }
  return static_cast<double>(sum);
}

inline BlendTerms blend_terms(double face, double comp, double fi, double ci,
                              const TuneConfig& cfg = {}) {
  BlendTerms t{fi, ci, 0.0, 0.0};
  if (ci == 0.0) {
    t.out = cfg.zero_ci_policy == ZeroCiPolicy::LeaveFace ? face : comp;
    return t;
  }
  t.intensity_factor = fi / ci;
  t.out = (face + 2.0 * t.intensity_factor * comp) / (1.0 + 2.0 * t.intensity_factor);
  return t;
}

/// Real-valued blend (F + 2*IF*C) / (1 + 2*IF) with IF = FI / CI.
inline double blend_pixel(double face, double comp, double fi, double ci,
                          const TuneConfig& cfg = {}) {
  return blend_terms(face, comp, fi, ci, cfg).out;
}

/// Round half up, then clamp to [0,255].
inline std::uint8_t commit_intensity(double v) {
  const double r = std::floor(v + 0.5);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/**
 * Masked placement with neighbourhood blending, updating the face in place.
 *
 * The component is scanned row by row. Every mask-0 pixel (i, j) lands at
 * (i + top_row, j + left_col); FI is read from the face as modified so far,
 * so earlier writes feed later sums. Pixels whose window would leave either
 * image are copied unblended.
 */
inline GrayImage tune_masked(const GrayImage& face, const GrayImage& comp, const BinaryMask& mask,
                             const Placement& p, const TuneConfig& cfg = {}) {
  if (!mask.same_shape(comp)) {
    throw Error(Errc::DimensionMismatch, "mask and component differ in size");
  }
  detail::require_comp_shape(comp, p);
  detail::require_inside(p, face.height(), face.width());

  GrayImage out = face;
  for (int i = 0; i < comp.height(); ++i) {
    for (int j = 0; j < comp.width(); ++j) {
      if (mask.at(i, j) != 0) continue;
      const int x = i + p.top_row;
      const int y = j + p.left_col;
      if (!window_inside(comp.height(), comp.width(), i, j) ||
          !window_inside(out.height(), out.width(), x, y)) {
        out.set(x, y, comp.at(i, j));
        continue;
      }
      const double fi = neighborhood_sum(out, x, y);
      const double ci = neighborhood_sum(comp, i, j);
      out.set(x, y, commit_intensity(blend_pixel(out.at(x, y), comp.at(i, j), fi, ci, cfg)));
    }
  }
  return out;
}

enum class ScanOrder { Forward, Reverse };

/**
 * Double-buffered tuning of a blank face against a component sheet.
 *
 * Output starts as a copy of blank. Each interior pixel whose sheet value
 * exceeds the threshold is replaced by the blend of blank and sheet, with
 * both 3x3 sums taken from the unmodified inputs, so the visiting order
 * does not affect the result.
 */
inline GrayImage tune_overlay(const GrayImage& blank, const GrayImage& sheet,
                              const TuneConfig& cfg = {}, ScanOrder order = ScanOrder::Forward) {
  if (!blank.same_shape(sheet)) {
    throw Error(Errc::DimensionMismatch, "blank face and component sheet differ in size");
  }
  GrayImage out = blank;
  const int h = blank.height();
  const int w = blank.width();
  auto visit = [&](int x, int y) {
    if (sheet.at(x, y) <= cfg.component_threshold.value) return;
    const double fi = neighborhood_sum(blank, x, y);
    const double ci = neighborhood_sum(sheet, x, y);
    out.set(x, y, commit_intensity(blend_pixel(blank.at(x, y), sheet.at(x, y), fi, ci, cfg)));
  };
  if (order == ScanOrder::Forward) {
    for (int x = 1; x <= h - 2; ++x)
      for (int y = 1; y <= w - 2; ++y) visit(x, y);
  } else {
    for (int x = h - 2; x >= 1; --x)
      for (int y = w - 2; y >= 1; --y) visit(x, y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seam measurement

struct PixelPair {
  int r0 = 0, c0 = 0;
  int r1 = 0, c1 = 0;
  friend bool operator==(const PixelPair&, const PixelPair&) = default;
};

/// Mean |a - b| over the listed pixel pairs.
inline double seam_contrast(const GrayImage& img, const std::vector<PixelPair>& boundary) {
  if (boundary.empty()) throw Error(Errc::EmptyBoundary, "no boundary pairs given");
  double total = 0.0;
  for (const auto& p : boundary) {
    total += std::abs(static_cast<int>(img.at(p.r0, p.c0)) - static_cast<int>(img.at(p.r1, p.c1)));
  }
  return total / static_cast<double>(boundary.size());
}

/// Canvas-sized mask: 0 where any component writes, 1 elsewhere. A null
/// mask pointer stands for the full rectangle (blind replacement).
inline BinaryMask coverage_mask(int canvas_h, int canvas_w,
                                const std::vector<PlacedComponent>& placed) {
  BinaryMask cover(canvas_w, canvas_h, 1);
  for (const auto& pc : placed) {
    const auto& p = pc.placement;
    detail::require_inside(p, canvas_h, canvas_w);
    for (int r = 0; r < p.height; ++r) {
      for (int c = 0; c < p.width; ++c) {
        if (pc.mask == nullptr || pc.mask->at(r, c) == 0) cover.set(p.top_row + r, p.left_col + c, 0);
      }
    }
  }
  return cover;
}

/// Horizontally and vertically adjacent pairs whose mask bits differ.
inline std::vector<PixelPair> seam_pairs(const BinaryMask& mask) {
  std::vector<PixelPair> out;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (c + 1 < mask.width() && mask.at(r, c) != mask.at(r, c + 1)) out.push_back({r, c, r, c + 1});
      if (r + 1 < mask.height() && mask.at(r, c) != mask.at(r + 1, c)) out.push_back({r, c, r + 1, c});
    }
  }
  return out;
}

}  // namespace fasy
