#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace fasy;

namespace {

FixedPixel px(int v) { return {static_cast<std::uint8_t>(v)}; }

// Integer rounding of (F*CI + 2*FI*C) / (CI + 2*FI) done with 64-bit
// arithmetic and an explicit remainder test.
int int_oracle(int f, int c, int fi, int ci) {
  const std::int64_t num = std::int64_t{f} * ci + 2LL * fi * c;
  const std::int64_t den = ci + 2LL * fi;
  const std::int64_t q = num / den, rem = num % den;
  return static_cast<int>(2 * rem >= den ? q + 1 : q);
}

}  // namespace

TEST_CASE("blend_pixel_int", "[datapath][blend]") {
  CHECK(blend_pixel_int(px(90), px(180), 810, 1620).value == 135);
  auto b = blend_pixel_int_terms(px(90), px(180), 810, 1620);
  CHECK(b.numerator == 90u * 1620u + 2u * 810u * 180u);
  CHECK(b.denominator == 1620u + 1620u);

  for (int v : {0, 1, 77, 254, 255}) CHECK(blend_pixel_int(px(v), px(v), 1000, 9).value == v);
  // FI == 0: output is the face value
  CHECK(blend_pixel_int(px(42), px(200), 0, 500).value == 42);
  // CI == 0 with FI > 0: output is the component value
  CHECK(blend_pixel_int(px(42), px(200), 500, 0).value == 200);

  CHECK_THROWS_MATCHES(blend_pixel_int(px(1), px(1), 0, 0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::DegenerateDenominator;
                       }));
  CHECK_THROWS_AS(blend_pixel_int(px(1), px(1), 2296, 9), Error);
}

TEST_CASE("blend_pixel_int rounds half up exactly", "[datapath][blend][property]") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> v(0, 255), s(0, 2295);
  for (int k = 0; k < 200000; ++k) {
    const int f = v(rng), c = v(rng), fi = s(rng), ci = s(rng);
    if (ci + 2 * fi == 0) continue;
    REQUIRE(blend_pixel_int(px(f), px(c), fi, ci).value == int_oracle(f, c, fi, ci));
  }
}

TEST_CASE("integer blend stays within one level of the real blend", "[datapath][blend][property]") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> v(0, 255), s(1, 2295);
  for (int k = 0; k < 100000; ++k) {
    const int f = v(rng), c = v(rng), fi = s(rng), ci = s(rng);
    const int golden = commit_intensity(blend_pixel(f, c, fi, ci));
    REQUIRE(std::abs(golden - blend_pixel_int(px(f), px(c), fi, ci).value) <= 1);
  }
}

TEST_CASE("stream_tune", "[datapath][stream]") {
  std::mt19937 rng(10);
  auto blank = test::random_image(rng, 23, 28);

  auto none = stream_tune(blank, GrayImage(23, 28, 0));
  CHECK(none.trace.empty());
  CHECK(none.image == blank);

  for (int k = 0; k < 50; ++k) {
    auto face = test::random_image(rng, 23, 28);
    auto sheet = test::random_sheet(rng, 23, 28);
    const TuneConfig cfg{Threshold{static_cast<std::uint8_t>(k % 3 == 0 ? 10 : 0)}};
    auto res = stream_tune(face, sheet, cfg);

    // non-streaming evaluation of the same integer kernel
    GrayImage expected = face;
    std::size_t blended = 0;
    for (int r = 1; r < 27; ++r) {
      for (int c = 1; c < 22; ++c) {
        if (sheet.at(r, c) <= cfg.component_threshold.value) continue;
        const auto fi = static_cast<std::uint32_t>(neighborhood_sum(face, r, c));
        const auto ci = static_cast<std::uint32_t>(neighborhood_sum(sheet, r, c));
        expected.set(r, c, blend_pixel_int(px(face.at(r, c)), px(sheet.at(r, c)), fi, ci).value);
        ++blended;
      }
    }
    REQUIRE(res.image == expected);
    REQUIRE(res.trace.size() == blended);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      const auto& a = res.trace[i - 1];
      const auto& b = res.trace[i];
      REQUIRE(std::pair{a.x, a.y} < std::pair{b.x, b.y});
    }
    for (const auto& e : res.trace) {
      REQUIRE(e.denominator == e.ci + 2 * e.fi);
      REQUIRE(e.committed == res.image.at(e.x, e.y));
    }
    REQUIRE(equivalence_report(tune_overlay(face, sheet, cfg), res.image).max_abs_diff <= 1);
  }
}

TEST_CASE("stream_tune handles thin images", "[datapath][stream]") {
  std::mt19937 rng(11);
  for (auto [w, h] : {std::pair{1, 1}, {5, 1}, {1, 5}, {2, 2}, {3, 3}}) {
    auto face = test::random_image(rng, w, h);
    auto sheet = test::random_image(rng, w, h, 1, 255);
    auto res = stream_tune(face, sheet);
    REQUIRE(res.image.width() == w);
    REQUIRE(res.image.height() == h);
    REQUIRE(res.trace.size() == (w == 3 && h == 3 ? 1u : 0u));
  }
}

TEST_CASE("equivalence_report", "[datapath][report]") {
  GrayImage a(2, 2, {1, 2, 3, 4});
  auto same = equivalence_report(a, a);
  CHECK(same.max_abs_diff == 0);
  CHECK(same.mismatch_count == 0);
  CHECK(same.diff_map == GrayImage(2, 2, 0));

  auto off = equivalence_report(a, GrayImage(2, 2, {1, 3, 0, 4}));
  CHECK(off.max_abs_diff == 3);
  CHECK(off.mismatch_count == 2);
  CHECK(off.diff_map == GrayImage(2, 2, {0, 1, 3, 0}));
  CHECK_THROWS_AS(equivalence_report(a, GrayImage(1, 2, 0)), Error);
}

TEST_CASE("run_textfile_flow", "[datapath][text]") {
  const std::string flat = write_intensity_text(GrayImage(23, 28, 100));
  auto same = run_textfile_flow(flat, flat, 23, 28);
  CHECK(same.output_text == flat);
  CHECK(same.trace.size() == 21u * 26u);

  const std::string zeros = write_intensity_text(GrayImage(23, 28, 0));
  CHECK(run_textfile_flow(flat, zeros, 23, 28).output_text == flat);

  std::mt19937 rng(12);
  for (int k = 0; k < 20; ++k) {
    auto face = test::random_image(rng, 23, 28);
    auto sheet = test::random_sheet(rng, 23, 28);
    auto res = run_textfile_flow(write_intensity_text(face), write_intensity_text(sheet), 23, 28);
    REQUIRE(res.image == stream_tune(face, sheet).image);
    REQUIRE(res.output_text == write_intensity_text(res.image));
  }
  CHECK_THROWS_AS(run_textfile_flow("1\n2\n", flat, 23, 28), Error);
}

TEST_CASE("format_trace_tsv", "[datapath][trace]") {
  DatapathTrace t{{1, 2, 810, 1620, 437400, 3240, 135, 135}};
  CHECK(format_trace_tsv({}) == "x\ty\tFI\tCI\tnum\tden\tout\n");
  CHECK(format_trace_tsv(t) == "x\ty\tFI\tCI\tnum\tden\tout\n1\t2\t810\t1620\t437400\t3240\t135\n");
}
