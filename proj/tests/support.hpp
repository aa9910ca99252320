#pragma once

// Test-only helpers: random generators and brute-force oracles. Nothing in
// here calls into the code paths the oracles are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fasy/fasy.hpp"

namespace fasy::test {

inline GrayImage random_image(std::mt19937& rng, int w, int h, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(d(rng));
  return GrayImage(w, h, std::move(px));
}

inline BinaryMask random_mask(std::mt19937& rng, int w, int h, double p_one = 0.5) {
  std::bernoulli_distribution d(p_one);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (auto& b : bits) b = d(rng) ? 1 : 0;
  return BinaryMask(w, h, std::move(bits));
}

/// Sheet with zero background and random blobs of nonzero intensities.
inline GrayImage random_sheet(std::mt19937& rng, int w, int h) {
  std::bernoulli_distribution on(0.45);
  std::uniform_int_distribution<int> v(1, 255);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = on(rng) ? static_cast<std::uint8_t>(v(rng)) : 0;
  return GrayImage(w, h, std::move(px));
}

// --- oracles ---------------------------------------------------------------

/// Otsu by recounting both classes from the raw pixels for every candidate.
inline int otsu_oracle(const GrayImage& img) {
  int best = -1;
  unsigned __int128 best_num = 0, best_den = 1;
  const auto px = img.pixels();
  for (int t = 0; t < 256; ++t) {
    std::uint64_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto v : px) {
      if (v < t) {
        ++n0;
        s0 += v;
      } else {
        ++n1;
        s1 += v;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    // n0*n1*(mu0-mu1)^2 = (n0*s1 - n1*s0)^2 / (n0*n1)
    __int128 diff = static_cast<__int128>(n0) * s1 - static_cast<__int128>(n1) * s0;
    unsigned __int128 num = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
    num *= num;
    unsigned __int128 den = static_cast<unsigned __int128>(n0) * n1;
    if (best < 0 || num * best_den > best_num * den) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

/// Smallest (col, row) among all white pixels, or nullopt.
inline std::optional<AnchorPoint> ear_oracle(const BinaryMask& m) {
  std::optional<std::pair<int, int>> best;
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m.at(r, c) != 1) continue;
      std::pair<int, int> key{c, r};
      if (!best || key < *best) best = key;
    }
  }
  if (!best) return std::nullopt;
  return AnchorPoint{best->second, best->first};
}

inline int round_half_up_clamp(double v) {
  return std::clamp(static_cast<int>(std::floor(v + 0.5)), 0, 255);
}

/// Straight scalar evaluation of the double-buffered tuning pass.
inline GrayImage tune_overlay_oracle(const GrayImage& i1, const GrayImage& i2, int threshold) {
  const int m = i1.height(), n = i1.width();
  std::vector<std::vector<int>> a(m, std::vector<int>(n)), b = a, out = a;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < n; ++y) {
      a[x][y] = i1.at(x, y);
      b[x][y] = i2.at(x, y);
      out[x][y] = a[x][y];
    }
  for (int x = 1; x + 1 < m; ++x) {
    for (int y = 1; y + 1 < n; ++y) {
      if (b[x][y] <= threshold) continue;
      const double fi = a[x - 1][y - 1] + a[x - 1][y] + a[x - 1][y + 1] + a[x][y - 1] + a[x][y] +
                        a[x][y + 1] + a[x + 1][y - 1] + a[x + 1][y] + a[x + 1][y + 1];
      const double ci = b[x - 1][y - 1] + b[x - 1][y] + b[x - 1][y + 1] + b[x][y - 1] + b[x][y] +
                        b[x][y + 1] + b[x + 1][y - 1] + b[x + 1][y] + b[x + 1][y + 1];
      const double intensity_factor = fi / ci;
      out[x][y] = round_half_up_clamp((a[x][y] + 2 * intensity_factor * b[x][y]) / (1 + 2 * intensity_factor));
    }
  }
  GrayImage res(n, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < n; ++y) res.set(x, y, static_cast<std::uint8_t>(out[x][y]));
  return res;
}

/// Literal step-by-step interpreter of the in-place masked placement, with
/// 1-based indices translated as i -> i-1. Unblendable border pixels are
/// copied; an all-zero component window leaves the face pixel alone.
inline GrayImage place_image_reference(const GrayImage& face_in, const GrayImage& comp,
                                       const BinaryMask& mask, int top, int left) {
  const int m = comp.height(), n = comp.width();
  const int fh = face_in.height(), fw = face_in.width();
  std::vector<int> f(face_in.pixels().begin(), face_in.pixels().end());
  auto F = [&](int x, int y) -> int& { return f[static_cast<std::size_t>(x) * fw + y]; };
  auto I = [&](int i, int j) { return static_cast<int>(comp.at(i, j)); };
  for (int i1 = 1; i1 <= m; ++i1) {
    for (int j1 = 1; j1 <= n; ++j1) {
      const int i = i1 - 1, j = j1 - 1;
      if (mask.at(i, j) != 0) continue;
      const int x = i + top, y = j + left;
      const bool comp_ok = i >= 1 && j >= 1 && i <= m - 2 && j <= n - 2;
      const bool face_ok = x >= 1 && y >= 1 && x <= fh - 2 && y <= fw - 2;
      if (!comp_ok || !face_ok) {
        F(x, y) = I(i, j);
        continue;
      }
      const double FI = F(x - 1, y - 1) + F(x - 1, y) + F(x - 1, y + 1) + F(x, y - 1) + F(x, y) + F(x, y + 1) +
                        F(x + 1, y - 1) + F(x + 1, y) + F(x + 1, y + 1);
      const double CI = I(i - 1, j - 1) + I(i - 1, j) + I(i - 1, j + 1) + I(i, j - 1) + I(i, j) + I(i, j + 1) +
                        I(i + 1, j - 1) + I(i + 1, j) + I(i + 1, j + 1);
      if (CI == 0) continue;
      const double IF = FI / CI;
      F(x, y) = round_half_up_clamp((F(x, y) + 2 * IF * I(i, j)) / (1 + 2 * IF));
    }
  }
  std::vector<std::uint8_t> px(f.begin(), f.end());
  return GrayImage(fw, fh, std::move(px));
}

/// Linear-scan predicate: every non-wildcard constraint equals the record value.
inline bool matches_oracle(const Query& q, const ComponentRecord& rec) {
  if (q.kind != rec.kind) return false;
  for (const auto& [name, value] : q.desired) {
    if (value == "CantSay") continue;
    auto it = rec.params.find(name);
    if (it == rec.params.end() || it->second != value) return false;
  }
  return true;
}

}  // namespace fasy::test
