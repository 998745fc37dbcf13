#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

namespace ssdcnn {
namespace {

using testing::make_ink;

Stroke stroke_of(std::initializer_list<std::pair<double, double>> pts) {
  Stroke s;
  for (auto [x, y] : pts) s.points.push_back(Point{x, y});
  return s;
}

double max_step(const Stroke& s) {
  double m = 0.0;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    m = std::max(m, std::hypot(s.points[i].x - s.points[i - 1].x, s.points[i].y - s.points[i - 1].y));
  }
  return m;
}

// every original point appears in order in the output
bool preserves_originals(const Stroke& in, const Stroke& out) {
  std::size_t j = 0;
  for (const auto& p : out.points) {
    if (j < in.points.size() && p == in.points[j]) ++j;
  }
  return j == in.points.size();
}

TEST(InterpolateLinear, TenUnitVerticalGivesElevenPoints) {
  const Stroke out = interpolate_linear(stroke_of({{0, 0}, {0, 10}}), 1.0);
  ASSERT_EQ(out.points.size(), 11u);
  for (int i = 0; i <= 10; ++i) {
    EXPECT_DOUBLE_EQ(out.points[static_cast<std::size_t>(i)].x, 0.0);
    EXPECT_DOUBLE_EQ(out.points[static_cast<std::size_t>(i)].y, i);
  }
}

TEST(InterpolateLinear, ShortGapUnchanged) {
  const Stroke in = stroke_of({{0, 0}, {0, 0.5}});
  EXPECT_EQ(interpolate_linear(in, 1.0), in);
}

TEST(InterpolateLinear, SinglePointUnchanged) {
  const Stroke in = stroke_of({{3, 3}});
  EXPECT_EQ(interpolate_linear(in, 1.0), in);
}

TEST(InterpolateLinear, NonPositiveGap) {
  EXPECT_THROW(interpolate_linear(stroke_of({{0, 0}, {1, 1}}), 0.0), Error);
  try {
    interpolate_linear(stroke_of({{0, 0}, {1, 1}}), -1.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveGap);
  }
}

TEST(InterpolateSpline, TwoPointsFallBackToLinear) {
  const Stroke in = stroke_of({{0, 0}, {3, 7}});
  EXPECT_EQ(interpolate_spline(in, 0.5), interpolate_linear(in, 0.5));
}

TEST(InterpolateSpline, CollinearStaysOnLine) {
  const Stroke out = interpolate_spline(stroke_of({{0, 0}, {0, 5}, {0, 10}}), 1.0);
  EXPECT_GE(out.points.size(), 11u);
  for (const auto& p : out.points) EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_LE(max_step(out), 1.0);
}

TEST(InterpolateSpline, SinglePointUnchanged) {
  const Stroke in = stroke_of({{3, 3}});
  EXPECT_EQ(interpolate_spline(in, 1.0), in);
}

TEST(Interpolate, RandomStrokesRespectGapAndKeepOriginals) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c(0, 31), g(0.3, 3.0);
  for (int t = 0; t < 200; ++t) {
    Stroke in;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) in.points.push_back(Point{c(rng), c(rng)});
    if (t % 10 == 0 && n > 2) in.points[1] = in.points[0];  // repeated sample
    const double gap = g(rng);
    for (auto method : {InterpolationMethod::Linear, InterpolationMethod::Spline}) {
      const Stroke out = interpolate(in, method, gap);
      EXPECT_LE(max_step(out), gap + 1e-9) << to_string(method);
      EXPECT_TRUE(preserves_originals(in, out)) << to_string(method);
    }
  }
}

TEST(Interpolate, NoneIsIdentity) {
  const Stroke in = stroke_of({{0, 0}, {10, 10}});
  EXPECT_EQ(interpolate(in, InterpolationMethod::None, 1.0), in);
}

TEST(NormalizeBox, SquareFillsRange) {
  const auto out = normalize_box(make_ink({{{0, 0}, {10, 10}}}), 32);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].x, 0.0);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].y, 0.0);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[1].x, 31.0);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[1].y, 31.0);
}

TEST(NormalizeBox, WideBoxIsCentered) {
  const auto out = normalize_box(make_ink({{{0, 0}, {10, 5}}}), 32);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].x, 0.0);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[1].x, 31.0);
  EXPECT_NEAR(out.strokes[0].points[0].y, 7.75, 1e-12);
  EXPECT_NEAR(out.strokes[0].points[1].y, 23.25, 1e-12);
}

TEST(NormalizeBox, DotGoesToCenter) {
  const auto out = normalize_box(make_ink({{{42, -7}}}), 32);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].x, 15.5);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].y, 15.5);
}

TEST(NormalizeBox, AlwaysInRange) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto out = normalize_box(testing::random_ink(rng, 5, 10, 1e4), 32);
    for (const auto& s : out.strokes) {
      for (const auto& p : s.points) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_LE(p.x, 31.0);
        EXPECT_GE(p.y, 0.0);
        EXPECT_LE(p.y, 31.0);
      }
    }
  }
}

TEST(Augment, ZeroProbabilityIsIdentity) {
  std::mt19937_64 rng(1);
  const auto ink = testing::random_ink(rng);
  EXPECT_EQ(augment_drop_points(ink, 0.0, 99), ink);
}

TEST(Augment, TwoPointStrokeUntouched) {
  const auto ink = make_ink({{{0, 0}, {5, 5}}});
  EXPECT_EQ(augment_drop_points(ink, 0.9, 3), ink);
}

TEST(Augment, DeterministicAndKeepsEndpoints) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto ink = testing::random_ink(rng, 6, 30);
    const auto a = augment_drop_points(ink, 0.5, 1234 + t);
    EXPECT_EQ(a, augment_drop_points(ink, 0.5, 1234 + t));
    ASSERT_EQ(a.strokes.size(), ink.strokes.size());
    for (std::size_t s = 0; s < ink.strokes.size(); ++s) {
      ASSERT_FALSE(a.strokes[s].points.empty());
      EXPECT_EQ(a.strokes[s].points.front(), ink.strokes[s].points.front());
      EXPECT_EQ(a.strokes[s].points.back(), ink.strokes[s].points.back());
      EXPECT_TRUE(preserves_originals(a.strokes[s], ink.strokes[s]));
    }
  }
}

TEST(Augment, DropsRoughlyTheRequestedFraction) {
  Stroke long_stroke;
  for (int i = 0; i < 2002; ++i) long_stroke.points.push_back(Point{static_cast<double>(i), 0});
  InkCharacter ink;
  ink.strokes.push_back(long_stroke);
  const auto out = augment_drop_points(ink, 0.3, 77);
  const double kept = static_cast<double>(out.strokes[0].points.size() - 2) / 2000.0;
  EXPECT_NEAR(kept, 0.7, 0.05);
}

TEST(PrepareForGrid, StaysInsideGrid) {
  std::mt19937_64 rng(4);
  PreprocessConfig cfg;
  for (auto m : {InterpolationMethod::None, InterpolationMethod::Linear, InterpolationMethod::Spline}) {
    cfg.method = m;
    for (int t = 0; t < 50; ++t) {
      const auto out = prepare_for_grid(testing::random_ink(rng), 32, cfg);
      for (const auto& s : out.strokes) {
        for (const auto& p : s.points) {
          EXPECT_GE(p.x, 0.0);
          EXPECT_LE(p.x, 31.0);
        }
      }
      EXPECT_NO_THROW(build_stack(out));
    }
  }
}

}  // namespace
}  // namespace ssdcnn
