#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fasy/catalog.hpp"
#include "fasy/error.hpp"
#include "fasy/image.hpp"

namespace fasy {

/// Upper-left corner of the right ear (row, col).
struct AnchorPoint {
  int row = 0;
  int col = 0;
  friend bool operator==(const AnchorPoint&, const AnchorPoint&) = default;
};

struct Placement {
  ComponentKind kind = ComponentKind::Nose;
  int top_row = 0;
  int left_col = 0;
  int height = 0;
  int width = 0;

  int bottom_row() const noexcept { return top_row + height; }  // exclusive
  int right_col() const noexcept { return left_col + width; }   // exclusive

  bool fits(int canvas_h, int canvas_w) const noexcept {
    return top_row >= 0 && left_col >= 0 && height >= 1 && width >= 1 &&
           bottom_row() <= canvas_h && right_col() <= canvas_w;
  }

  Placement shifted(int d_row, int d_col) const noexcept {
    Placement p = *this;
    p.top_row += d_row;
    p.left_col += d_col;
    return p;
  }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct ComponentDims {
  int height = 0;
  int width = 0;
};

struct Layout {
  AnchorPoint anchor;  // column already shifted by the ear offset
  std::map<ComponentKind, Placement> placements;

  const Placement& at(ComponentKind k) const {
    auto it = placements.find(k);
    if (it == placements.end()) {
      throw Error(Errc::UnknownKind, "layout has no placement for " + std::string(kind_name(k)));
    }
    return it->second;
  }

  friend bool operator==(const Layout&, const Layout&) = default;
};

/**
 * Offsets used by the layout equations. The defaults are calibrated for
 * 92x112 face cuttings; scaled_for() stretches them proportionally for
 * other canvases, but nothing applies that automatically.
 */
struct LayoutConstants {
  int ear_col_shift = 10;
  int brow_raise = 5;
  int nose_raise = 2;
  int brow_nose_overlap = 5;
  int lip_gap = 5;

  static constexpr int kReferenceWidth = 92;
  static constexpr int kReferenceHeight = 112;

  static LayoutConstants scaled_for(int canvas_h, int canvas_w) {
    auto sc = [](int v, int num, int den) {
      return static_cast<int>((static_cast<long long>(v) * num + den / 2) / den);
    };
    LayoutConstants c;
    c.ear_col_shift = sc(c.ear_col_shift, canvas_w, kReferenceWidth);
    c.brow_nose_overlap = sc(c.brow_nose_overlap, canvas_w, kReferenceWidth);
    c.brow_raise = sc(c.brow_raise, canvas_h, kReferenceHeight);
    c.nose_raise = sc(c.nose_raise, canvas_h, kReferenceHeight);
    c.lip_gap = sc(c.lip_gap, canvas_h, kReferenceHeight);
    return c;
  }
};

/// Leftmost column holding a 1 bit, topmost row within that column.
inline AnchorPoint find_ear_position(const BinaryMask& mask) {
  for (int c = 0; c < mask.width(); ++c) {
    for (int r = 0; r < mask.height(); ++r) {
      if (mask.at(r, c) == 1) return {r, c};
    }
  }
  throw Error(Errc::NoForeground, "mask contains no white pixel");
}

namespace detail {

inline int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace detail

inline Layout compute_layout(AnchorPoint anchor, const std::map<ComponentKind, ComponentDims>& dims,
                             const LayoutConstants& k = {}) {
  for (auto kind : kPlacementOrder) {
    if (!dims.count(kind)) {
      throw Error(Errc::MissingKind, "no dimensions for " + std::string(kind_name(kind)));
    }
  }
  const auto& reb = dims.at(ComponentKind::RightEyebrow);
  const auto& reye = dims.at(ComponentKind::RightEye);
  const auto& leb = dims.at(ComponentKind::LeftEyebrow);
  const auto& leye = dims.at(ComponentKind::LeftEye);
  const auto& nose = dims.at(ComponentKind::Nose);
  const auto& lip = dims.at(ComponentKind::Lip);

  const int tx = anchor.row;
  const int ty = anchor.col + k.ear_col_shift;

  Layout layout;
  layout.anchor = {tx, ty};
  auto put = [&](ComponentKind kind, int row, int col, const ComponentDims& d) {
    if (row < 0 || col < 0) {
      std::ostringstream msg;
      msg << kind_name(kind) << " lands at (" << row << "," << col
          << "); the face cutting is too close to the border";
      throw Error(Errc::NegativeCoordinate, msg.str());
    }
    layout.placements[kind] = Placement{kind, row, col, d.height, d.width};
  };

  put(ComponentKind::RightEyebrow, tx - k.brow_raise, ty, reb);
  put(ComponentKind::RightEye, tx, ty + reb.width - reye.width, reye);
  const int nose_row = tx - k.nose_raise;
  const int nose_col = ty + reb.width;
  put(ComponentKind::Nose, nose_row, nose_col, nose);
  const int leb_col = nose_col + nose.width - k.brow_nose_overlap;
  put(ComponentKind::LeftEyebrow, tx - k.brow_raise, leb_col, leb);
  put(ComponentKind::LeftEye, tx, leb_col, leye);
  put(ComponentKind::Lip, nose_row + nose.height + k.lip_gap,
      nose_col + detail::floor_div2(nose.width) - detail::floor_div2(lip.width), lip);
  return layout;
}

/// One "Kind: top_row,left_col" line per placement.
inline std::string format_layout(const Layout& layout) {
  std::ostringstream out;
  out << "Anchor: " << layout.anchor.row << "," << layout.anchor.col << "\n";
  for (auto kind : kPlacementOrder) {
    auto it = layout.placements.find(kind);
    if (it == layout.placements.end()) continue;
    out << kind_name(kind) << ": " << it->second.top_row << "," << it->second.left_col << "\n";
  }
  return out.str();
}

namespace detail {

inline void require_inside(const Placement& p, int canvas_h, int canvas_w) {
  if (!p.fits(canvas_h, canvas_w)) {
    std::ostringstream msg;
    msg << kind_name(p.kind) << " rectangle rows [" << p.top_row << "," << p.bottom_row()
        << ") cols [" << p.left_col << "," << p.right_col() << ") exceeds " << canvas_w << "x"
        << canvas_h << " canvas";
    throw Error(Errc::OutOfBounds, msg.str());
  }
}

inline void require_comp_shape(const GrayImage& comp, const Placement& p) {
  if (comp.height() != p.height || comp.width() != p.width) {
    throw Error(Errc::DimensionMismatch, "placement size differs from component image");
  }
}

}  // namespace detail

/// Copies the whole component rectangle onto the face.
inline GrayImage overlay_blind(const GrayImage& face, const GrayImage& comp, const Placement& p) {
  detail::require_comp_shape(comp, p);
  detail::require_inside(p, face.height(), face.width());
  GrayImage out = face;
  for (int r = 0; r < comp.height(); ++r) {
    for (int c = 0; c < comp.width(); ++c) out.set(p.top_row + r, p.left_col + c, comp.at(r, c));
  }
  return out;
}

/// Copies only the component's mask-0 (foreground) pixels.
inline GrayImage overlay_masked(const GrayImage& face, const GrayImage& comp,
                                const BinaryMask& mask, const Placement& p) {
  if (!mask.same_shape(comp)) {
    throw Error(Errc::DimensionMismatch, "mask and component differ in size");
  }
  detail::require_comp_shape(comp, p);
  detail::require_inside(p, face.height(), face.width());
  GrayImage out = face;
  for (int r = 0; r < comp.height(); ++r) {
    for (int c = 0; c < comp.width(); ++c) {
      if (mask.at(r, c) == 0) out.set(p.top_row + r, p.left_col + c, comp.at(r, c));
    }
  }
  return out;
}

struct PlacedComponent {
  const GrayImage* image = nullptr;
  const BinaryMask* mask = nullptr;
  Placement placement;
};

/// Black canvas holding only the components' foreground pixels; later
/// entries win where rectangles overlap.
inline GrayImage build_component_sheet(int canvas_h, int canvas_w,
                                       const std::vector<PlacedComponent>& placed) {
  GrayImage sheet(canvas_w, canvas_h, 0);
  for (const auto& pc : placed) sheet = overlay_masked(sheet, *pc.image, *pc.mask, pc.placement);
  return sheet;
}

}  // namespace fasy
