#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace fasy;

namespace {

std::map<ComponentKind, ComponentDims> fixture_dims() {
  return {
      {ComponentKind::RightEyebrow, {4, 20}}, {ComponentKind::RightEye, {8, 12}},
      {ComponentKind::LeftEyebrow, {4, 20}},  {ComponentKind::LeftEye, {8, 12}},
      {ComponentKind::Nose, {30, 15}},        {ComponentKind::Lip, {9, 18}},
  };
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("find_ear_position scans columns first", "[assembler][ear]") {
  CHECK(code_of([] { find_ear_position(BinaryMask(3, 3, 0)); }) == Errc::NoForeground);

  BinaryMask one(3, 3, 0);
  one.set(2, 0, 1);
  CHECK(find_ear_position(one) == AnchorPoint{2, 0});

  BinaryMask two(3, 3, 0);
  two.set(0, 1, 1);
  two.set(2, 0, 1);
  CHECK(find_ear_position(two) == AnchorPoint{2, 0});
}

TEST_CASE("find_ear_position matches the (col,row) argmin oracle", "[assembler][ear][property]") {
  std::mt19937 rng(17);
  for (int k = 0; k < 500; ++k) {
    const int w = 1 + static_cast<int>(rng() % 30), h = 1 + static_cast<int>(rng() % 30);
    auto m = test::random_mask(rng, w, h, 0.02 + 0.1 * (k % 5));
    auto expected = test::ear_oracle(m);
    if (!expected) {
      REQUIRE(code_of([&] { find_ear_position(m); }) == Errc::NoForeground);
    } else {
      REQUIRE(find_ear_position(m) == *expected);
    }
  }
}

TEST_CASE("compute_layout evaluates the placement equations", "[assembler][layout]") {
  const Layout l = compute_layout({10, 20}, fixture_dims());
  CHECK(l.anchor == AnchorPoint{10, 30});
  auto pos = [&](ComponentKind k) { return std::pair{l.at(k).top_row, l.at(k).left_col}; };
  CHECK(pos(ComponentKind::RightEyebrow) == std::pair{5, 30});
  CHECK(pos(ComponentKind::RightEye) == std::pair{10, 38});
  CHECK(pos(ComponentKind::Nose) == std::pair{8, 50});
  CHECK(pos(ComponentKind::LeftEyebrow) == std::pair{5, 60});
  CHECK(pos(ComponentKind::LeftEye) == std::pair{10, 60});
  CHECK(pos(ComponentKind::Lip) == std::pair{43, 48});
  CHECK(l.at(ComponentKind::Nose).height == 30);
  CHECK(l.at(ComponentKind::Nose).width == 15);
  CHECK(l.placements.size() == 6);
}

TEST_CASE("compute_layout rejects placements above or left of the canvas", "[assembler][layout]") {
  CHECK(code_of([] { compute_layout({2, 0}, fixture_dims()); }) == Errc::NegativeCoordinate);

  auto dims = fixture_dims();
  dims[ComponentKind::RightEye] = {8, 45};  // wider than brow + ear shift
  try {
    compute_layout({10, 0}, dims);
    FAIL("expected NegativeCoordinate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NegativeCoordinate);
    CHECK(std::string(e.what()).find("RightEye") != std::string::npos);
  }

  dims = fixture_dims();
  dims.erase(ComponentKind::Lip);
  CHECK(code_of([&] { compute_layout({10, 20}, dims); }) == Errc::MissingKind);
}

TEST_CASE("compute_layout is translation covariant", "[assembler][layout][property]") {
  std::mt19937 rng(4);
  const Layout base = compute_layout({10, 20}, fixture_dims());
  for (int k = 0; k < 100; ++k) {
    const int dr = static_cast<int>(rng() % 60), dc = static_cast<int>(rng() % 60);
    const Layout moved = compute_layout({10 + dr, 20 + dc}, fixture_dims());
    for (const auto& [kind, p] : base.placements) REQUIRE(moved.at(kind) == p.shifted(dr, dc));
  }
}

TEST_CASE("scaled layout constants are proportional", "[assembler][layout]") {
  auto same = LayoutConstants::scaled_for(112, 92);
  CHECK(same.ear_col_shift == 10);
  CHECK(same.brow_raise == 5);
  auto half = LayoutConstants::scaled_for(56, 46);
  CHECK(half.ear_col_shift == 5);
  CHECK(half.nose_raise == 1);
}

TEST_CASE("overlay_blind", "[assembler][overlay]") {
  GrayImage face(4, 4, 255);
  auto out = overlay_blind(face, GrayImage(1, 1, {0}), {ComponentKind::Nose, 0, 0, 1, 1});
  CHECK(out.at(0, 0) == 0);
  int changed = 0;
  for (auto v : out.pixels()) changed += v != 255;
  CHECK(changed == 1);

  CHECK(code_of([&] { overlay_blind(face, GrayImage(2, 2, 0), {ComponentKind::Nose, 3, 3, 2, 2}); }) ==
        Errc::OutOfBounds);

  std::mt19937 rng(9);
  for (int k = 0; k < 50; ++k) {
    auto f = test::random_image(rng, 20, 16);
    auto c = test::random_image(rng, 6, 5);
    const Placement p{ComponentKind::Lip, static_cast<int>(rng() % 12), static_cast<int>(rng() % 15), 5, 6};
    auto o = overlay_blind(f, c, p);
    for (int r = 0; r < 16; ++r) {
      for (int col = 0; col < 20; ++col) {
        const bool inside = r >= p.top_row && r < p.bottom_row() && col >= p.left_col && col < p.right_col();
        REQUIRE(o.at(r, col) == (inside ? c.at(r - p.top_row, col - p.left_col) : f.at(r, col)));
      }
    }
    // copying the face's own region back is the identity
    GrayImage region(6, 5);
    for (int r = 0; r < 5; ++r)
      for (int col = 0; col < 6; ++col) region.set(r, col, f.at(p.top_row + r, p.left_col + col));
    REQUIRE(overlay_blind(f, region, p) == f);
  }
}

TEST_CASE("overlay_masked", "[assembler][overlay]") {
  std::mt19937 rng(10);
  auto face = test::random_image(rng, 12, 12);
  auto comp = test::random_image(rng, 5, 4);
  const Placement p{ComponentKind::RightEye, 3, 2, 4, 5};
  CHECK(overlay_masked(face, comp, BinaryMask(5, 4, 1), p) == face);
  CHECK(overlay_masked(face, comp, BinaryMask(5, 4, 0), p) == overlay_blind(face, comp, p));
  CHECK(code_of([&] { overlay_masked(face, comp, BinaryMask(4, 4, 0), p); }) == Errc::DimensionMismatch);
  CHECK(code_of([&] { overlay_masked(face, comp, BinaryMask(5, 4, 0), p.shifted(9, 0)); }) == Errc::OutOfBounds);

  BinaryMask checker(5, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 5; ++c) checker.set(r, c, static_cast<std::uint8_t>((r + c) % 2));
  auto o = overlay_masked(face, comp, checker, p);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      const int lr = r - p.top_row, lc = c - p.left_col;
      const bool inside = lr >= 0 && lr < 4 && lc >= 0 && lc < 5;
      const auto expect = inside && checker.at(lr, lc) == 0 ? comp.at(lr, lc) : face.at(r, c);
      REQUIRE(o.at(r, c) == expect);
    }
  }
}

TEST_CASE("build_component_sheet", "[assembler][sheet]") {
  CHECK(build_component_sheet(6, 7, {}) == GrayImage(7, 6, 0));

  GrayImage dot(1, 1, {200});
  BinaryMask on(1, 1, 0);
  auto sheet = build_component_sheet(6, 7, {{&dot, &on, {ComponentKind::Nose, 3, 4, 1, 1}}});
  GrayImage expected(7, 6, 0);
  expected.set(3, 4, 200);
  CHECK(sheet == expected);

  // overlapping components: replaying the copies in order is the oracle
  std::mt19937 rng(12);
  auto a = test::random_image(rng, 4, 4, 1, 255);
  auto b = test::random_image(rng, 4, 4, 1, 255);
  auto ma = test::random_mask(rng, 4, 4);
  auto mb = test::random_mask(rng, 4, 4);
  const Placement pa{ComponentKind::LeftEye, 1, 1, 4, 4}, pb{ComponentKind::Nose, 2, 3, 4, 4};
  auto s = build_component_sheet(8, 8, {{&a, &ma, pa}, {&b, &mb, pb}});
  std::vector<std::vector<int>> replay(8, std::vector<int>(8, 0));
  for (auto [img, m, p] : {std::tuple{&a, &ma, pa}, std::tuple{&b, &mb, pb}}) {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (m->at(r, c) == 0) replay[p.top_row + r][p.left_col + c] = img->at(r, c);
  }
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) REQUIRE(s.at(r, c) == replay[r][c]);
  CHECK(code_of([&] { build_component_sheet(3, 3, {{&a, &ma, pa}}); }) == Errc::OutOfBounds);
}

TEST_CASE("format_layout lists each placement", "[assembler]") {
  const auto text = format_layout(compute_layout({10, 20}, fixture_dims()));
  CHECK(text.find("RightEyebrow: 5,30\n") != std::string::npos);
  CHECK(text.find("Lip: 43,48\n") != std::string::npos);
}
