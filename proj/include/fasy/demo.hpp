#pragma once

// Deterministic synthetic catalog used by `fasy generate` when no catalog
// directory is supplied, and by the end-to-end tests. Face cuttings are
// 92x112 with dark background, a skin-toned head ellipse, hair and ears;
// components are small rectangles of lighter skin holding a darker feature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fasy/catalog.hpp"
#include "fasy/image.hpp"

namespace fasy::demo {

inline constexpr int kFaceWidth = 92;
inline constexpr int kFaceHeight = 112;

namespace detail {

inline bool in_ellipse(double r, double c, double cr, double cc, double rr, double rc) {
  const double dr = (r - cr) / rr;
  const double dc = (c - cc) / rc;
  return dr * dr + dc * dc <= 1.0;
}

inline std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

class Painter {
 public:
  Painter(int w, int h, int fill, unsigned seed) : img_(w, h, clamp8(fill)), rng_(seed) {}

  template <typename Pred>
  void fill(Pred inside, int value, int noise = 0) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    for (int r = 0; r < img_.height(); ++r) {
      for (int c = 0; c < img_.width(); ++c) {
        if (inside(r, c)) img_.set(r, c, clamp8(value + (noise ? jitter(rng_) : 0)));
      }
    }
  }

  GrayImage take() { return std::move(img_); }

 private:
  GrayImage img_;
  std::mt19937 rng_;
};

}  // namespace detail

struct FaceStyle {
  int skin = 150;
  int hair = 60;
  int hair_line = 34;  // rows above this inside the head are hair
  int head_half_width = 34;
  unsigned seed = 1;
};

inline GrayImage make_face_cutting(const FaceStyle& s) {
  detail::Painter p(kFaceWidth, kFaceHeight, 25, s.seed);
  const double cr = 58, cc = 46, rr = 46, rc = s.head_half_width;
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, cr, cc, rr, rc); }, s.skin, 3);
  p.fill([&](int r, int c) { return r < s.hair_line && detail::in_ellipse(r, c, cr, cc, rr, rc); },
         s.hair, 4);
  // Ears: rounded blocks touching the head at mid height.
  const int left = static_cast<int>(cc - rc) - 6;
  const int right = static_cast<int>(cc + rc) + 1;
  p.fill([&](int r, int c) { return r >= 44 && r < 64 && c >= left && c < left + 8; }, s.skin - 5, 3);
  p.fill([&](int r, int c) { return r >= 44 && r < 64 && c >= right && c < right + 6; }, s.skin - 5, 3);
  return p.take();
}

inline GrayImage make_eyebrow(int width, int height, int tone, bool mirror, unsigned seed) {
  detail::Painter p(width, height, 185, seed);
  p.fill(
      [&](int r, int c) {
        const int cc = mirror ? width - 1 - c : c;
        // arch: thicker toward the inner end
        const double t = static_cast<double>(cc) / std::max(1, width - 1);
        const double centre = 1.0 + 1.5 * std::sin(t * 3.14159);
        return std::abs(r - (height - 1 - centre)) <= 1.0 + 0.5 * t;
      },
      tone, 4);
  return p.take();
}

inline GrayImage make_eye(int width, int height, unsigned seed) {
  detail::Painter p(width, height, 190, seed);
  const double cr = (height - 1) / 2.0, cc = (width - 1) / 2.0;
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, cr, cc, height / 2.0 - 1, width / 2.0 - 1); },
         80, 4);
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, cr, cc, height / 4.0, height / 4.0); }, 30, 2);
  return p.take();
}

inline GrayImage make_nose(int width, int height, unsigned seed) {
  detail::Painter p(width, height, 180, seed);
  const double nr = height - 4.0;
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, nr, width * 0.3, 2.2, 3.0); }, 60, 3);
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, nr, width * 0.7, 2.2, 3.0); }, 60, 3);
  p.fill([&](int r, int c) { return r < height - 7 && (c == width / 2 - 2 || c == width / 2 + 1); }, 110, 3);
  return p.take();
}

inline GrayImage make_lip(int width, int height, bool wavy, unsigned seed) {
  detail::Painter p(width, height, 182, seed);
  const double cr = (height - 1) / 2.0, cc = (width - 1) / 2.0;
  p.fill([&](int r, int c) { return detail::in_ellipse(r, c, cr, cc, height / 2.0 - 1, width / 2.0 - 1); },
         105, 4);
  p.fill(
      [&](int r, int c) {
        const double line = cr + (wavy ? std::sin(c * 0.6) : 0.0);
        return std::abs(r - line) <= 0.5 && detail::in_ellipse(r, c, cr, cc, height / 2.0, width / 2.0 - 1);
      },
      55, 2);
  return p.take();
}

inline int length_to_width(const std::string& length, int normal) {
  if (length == "Small") return normal - 4;
  if (length == "Large" || length == "Wide") return normal + 2;
  return normal;
}

/// Three face cuttings and three variants of every component, with the
/// first variant of each kind answering the "Face impressions" example
/// (male, oval, normal hair; large elliptic dense brows; normal eyes,
/// nose and lips).
inline Catalog make_catalog() {
  Catalog cat;
  const std::string src = "synthetic demo fixture";

  struct FaceVariant {
    ParamMap params;
    FaceStyle style;
  };
  const std::vector<FaceVariant> faces = {
      {{{"Sex", "Male"}, {"Shape", "Oval"}, {"HairDensity", "Normal"}}, {150, 60, 30, 34, 11}},
      {{{"Sex", "Female"}, {"Shape", "Round"}, {"HairDensity", "HighlyDense"}}, {165, 45, 36, 35, 12}},
      {{{"Sex", "Male"}, {"Shape", "Round"}, {"HairDensity", "LowDense"}}, {135, 80, 24, 35, 13}},
  };
  for (const auto& f : faces) cat.ingest(ComponentKind::FaceCutting, f.params, make_face_cutting(f.style), std::nullopt, src);

  const std::vector<ParamMap> brows = {
      {{"Length", "Large"}, {"Width", "Normal"}, {"Shape", "Elliptic"}, {"Hair", "HighlyDense"}},
      {{"Length", "Small"}, {"Width", "Small"}, {"Shape", "Flat"}, {"Hair", "LowDense"}},
      {{"Length", "Normal"}, {"Width", "Large"}, {"Shape", "Wavy"}, {"Hair", "Normal"}},
  };
  unsigned seed = 100;
  for (const auto& b : brows) {
    const int w = length_to_width(b.at("Length"), 20);
    const int tone = b.at("Hair") == "HighlyDense" ? 35 : b.at("Hair") == "LowDense" ? 90 : 60;
    cat.ingest(ComponentKind::RightEyebrow, b, make_eyebrow(w, 5, tone, false, ++seed), std::nullopt, src);
    cat.ingest(ComponentKind::LeftEyebrow, b, make_eyebrow(w, 5, tone, true, ++seed), std::nullopt, src);
  }

  const std::vector<ParamMap> eyes = {
      {{"Length", "Normal"}, {"Width", "Normal"}, {"Shape", "Elliptic"}},
      {{"Length", "Large"}, {"Width", "Normal"}, {"Shape", "Round"}},
      {{"Length", "Small"}, {"Width", "Small"}, {"Shape", "Round"}},
  };
  for (const auto& e : eyes) {
    const int w = length_to_width(e.at("Length"), 14);
    const int h = e.at("Width") == "Small" ? 7 : 8;
    cat.ingest(ComponentKind::RightEye, e, make_eye(w, h, ++seed), std::nullopt, src);
    cat.ingest(ComponentKind::LeftEye, e, make_eye(w, h, ++seed), std::nullopt, src);
  }

  const std::vector<ParamMap> noses = {
      {{"Sharpness", "Normal"}, {"Length", "Normal"}, {"Width", "Normal"}},
      {{"Sharpness", "Sharp"}, {"Length", "Large"}, {"Width", "Small"}},
      {{"Sharpness", "Blunt"}, {"Length", "Small"}, {"Width", "Large"}},
  };
  for (const auto& n : noses) {
    const int w = length_to_width(n.at("Width"), 20);
    const int h = n.at("Length") == "Large" ? 27 : n.at("Length") == "Small" ? 20 : 24;
    cat.ingest(ComponentKind::Nose, n, make_nose(w, h, ++seed), std::nullopt, src);
  }

  const std::vector<ParamMap> lips = {
      {{"Length", "Normal"}, {"Width", "Normal"}, {"Shape", "Linear"}},
      {{"Length", "Wide"}, {"Width", "Thick"}, {"Shape", "Wavy"}},
      {{"Length", "Small"}, {"Width", "Thin"}, {"Shape", "Linear"}},
  };
  for (const auto& l : lips) {
    const int w = length_to_width(l.at("Length"), 26);
    const int h = l.at("Width") == "Thick" ? 12 : l.at("Width") == "Thin" ? 8 : 10;
    cat.ingest(ComponentKind::Lip, l, make_lip(w, h, l.at("Shape") == "Wavy", ++seed), std::nullopt, src);
  }
  return cat;
}

/// The "Face impressions of a person" description: one query per kind.
inline std::map<ComponentKind, Query> reference_description() {
  const ParamMap brow = {{"Length", "Large"}, {"Width", "Normal"}, {"Shape", "Elliptic"}, {"Hair", "Highly Dense"}};
  const ParamMap eye = {{"Length", "Normal"}, {"Width", "Normal"}, {"Shape", "Elliptic"}};
  return {
      {ComponentKind::FaceCutting,
       {ComponentKind::FaceCutting, {{"Sex", "Male"}, {"Shape", "Oval"}, {"Hair Density", "Normal"}}}},
      {ComponentKind::RightEyebrow, {ComponentKind::RightEyebrow, brow}},
      {ComponentKind::RightEye, {ComponentKind::RightEye, eye}},
      {ComponentKind::LeftEyebrow, {ComponentKind::LeftEyebrow, brow}},
      {ComponentKind::LeftEye, {ComponentKind::LeftEye, eye}},
      {ComponentKind::Nose,
       {ComponentKind::Nose, {{"Sharpness", "Normal"}, {"Length", "Normal"}, {"Width", "Normal"}}}},
      {ComponentKind::Lip,
       {ComponentKind::Lip, {{"Length", "Normal"}, {"Width", "Normal"}, {"Shape", "Cant Say"}}}},
  };
}

}  // namespace fasy::demo
