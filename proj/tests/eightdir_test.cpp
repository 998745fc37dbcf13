#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

namespace ssdcnn {
namespace {

using testing::make_ink;

double block_sum(const std::vector<double>& f, int d) {
  double s = 0.0;
  for (int i = 0; i < 64; ++i) s += f[static_cast<std::size_t>(d * 64 + i)];
  return s;
}

TEST(VirtualStrokes, CountsAndEndpoints) {
  EXPECT_TRUE(add_virtual_strokes(make_ink({{{0, 0}, {1, 1}}})).virtual_segments.empty());
  const auto ink = make_ink({{{0, 0}, {1, 0}}, {{5, 5}, {6, 6}}, {{9, 9}}});
  const auto pen = add_virtual_strokes(ink);
  ASSERT_EQ(pen.virtual_segments.size(), 2u);
  EXPECT_EQ(pen.virtual_segments[0], (Segment{Point{1, 0}, Point{5, 5}}));
  EXPECT_EQ(pen.virtual_segments[1], (Segment{Point{6, 6}, Point{9, 9}}));
  EXPECT_EQ(pen.ink, ink);
}

TEST(MomentNormalize, SymmetricSetCentered) {
  const auto out = moment_normalize(make_ink({{{-3, -2}, {3, 2}}, {{-3, 2}, {3, -2}}}), 64);
  double cx = 0, cy = 0;
  for (const auto& s : out.strokes) {
    for (const auto& p : s.points) {
      cx += p.x / 4;
      cy += p.y / 4;
    }
  }
  EXPECT_NEAR(cx, 31.5, 1e-12);
  EXPECT_NEAR(cy, 31.5, 1e-12);
}

TEST(MomentNormalize, DotCentered) {
  const auto out = moment_normalize(make_ink({{{123, -45}}}), 64);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].x, 31.5);
  EXPECT_DOUBLE_EQ(out.strokes[0].points[0].y, 31.5);
}

TEST(MomentNormalize, TwoSigmaSpansGrid) {
  // x has sigma 1 about the centroid, so +-2 maps to the grid edges
  const auto out = moment_normalize(make_ink({{{-1, 0}, {1, 0}}}), 64);
  EXPECT_NEAR(out.strokes[0].points[0].x, 31.5 - 63.0 / 4, 1e-12);
  EXPECT_NEAR(out.strokes[0].points[1].x, 31.5 + 63.0 / 4, 1e-12);
}

TEST(MomentNormalize, TranslationInvariant) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto ink = testing::random_ink(rng);
    auto moved = ink;
    for (auto& s : moved.strokes) {
      for (auto& p : s.points) {
        p.x += 250.0;
        p.y -= 125.0;
      }
    }
    const auto a = moment_normalize(ink, 64), b = moment_normalize(moved, 64);
    for (std::size_t s = 0; s < a.strokes.size(); ++s) {
      for (std::size_t i = 0; i < a.strokes[s].points.size(); ++i) {
        EXPECT_NEAR(a.strokes[s].points[i].x, b.strokes[s].points[i].x, 1e-9);
        EXPECT_NEAR(a.strokes[s].points[i].y, b.strokes[s].points[i].y, 1e-9);
      }
    }
  }
}

TEST(Decompose, AxisAligned) {
  const auto r = decompose_direction(1, 0);
  EXPECT_EQ(r[0], 1.0);
  for (int d = 1; d < 8; ++d) EXPECT_EQ(r[static_cast<std::size_t>(d)], 0.0);
  const auto down = decompose_direction(0, 1);
  EXPECT_EQ(down[2], 1.0);
  for (int d : {0, 1, 3, 4, 5, 6, 7}) EXPECT_EQ(down[static_cast<std::size_t>(d)], 0.0);
}

TEST(Decompose, DiagonalsAreExact) {
  for (int d = 0; d < 8; ++d) {
    const double a = d * std::numbers::pi / 4;
    const auto r = decompose_direction(std::cos(a), std::sin(a));
    for (int e = 0; e < 8; ++e) EXPECT_NEAR(r[static_cast<std::size_t>(e)], e == d ? 1.0 : 0.0, 1e-12) << d;
  }
}

TEST(Decompose, HalfwayIsSymmetric) {
  const double a = std::numbers::pi / 8;
  const auto r = decompose_direction(std::cos(a), std::sin(a));
  EXPECT_GT(r[0], 0.0);
  EXPECT_GT(r[1], 0.0);
  EXPECT_NEAR(r[0], r[1], 1e-12);
  for (int d = 2; d < 8; ++d) EXPECT_EQ(r[static_cast<std::size_t>(d)], 0.0);
  // parallelogram: w0 * e0 + w1 * e1 reconstructs the unit vector
  const double h = std::numbers::sqrt2 / 2;
  EXPECT_NEAR(r[0] + r[1] * h, std::cos(a), 1e-12);
  EXPECT_NEAR(r[1] * h, std::sin(a), 1e-12);
}

TEST(Decompose, RandomDirectionsUseTwoAdjacentReferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  const double h = std::numbers::sqrt2 / 2;
  const double ref[8][2] = {{1, 0}, {h, h}, {0, 1}, {-h, h}, {-1, 0}, {-h, -h}, {0, -1}, {h, -h}};
  for (int t = 0; t < 1000; ++t) {
    const double a = ang(rng);
    const auto r = decompose_direction(3 * std::cos(a), 3 * std::sin(a));
    int positive = 0;
    double x = 0, y = 0;
    for (int d = 0; d < 8; ++d) {
      const double w = r[static_cast<std::size_t>(d)];
      EXPECT_GE(w, 0.0);
      if (w > 0) ++positive;
      x += w * ref[d][0];
      y += w * ref[d][1];
    }
    EXPECT_LE(positive, 2);
    const int d0 = static_cast<int>(std::floor(a / (std::numbers::pi / 4))) % 8;
    for (int d = 0; d < 8; ++d) {
      if (d != d0 && d != (d0 + 1) % 8) {
        EXPECT_EQ(r[static_cast<std::size_t>(d)], 0.0);
      }
    }
    EXPECT_NEAR(x, std::cos(a), 1e-9);
    EXPECT_NEAR(y, std::sin(a), 1e-9);
    const double sum = r[static_cast<std::size_t>(d0)] + r[static_cast<std::size_t>((d0 + 1) % 8)];
    EXPECT_GE(sum, 1.0 - 1e-12);
    EXPECT_LE(sum, std::sqrt(4 - 2 * std::numbers::sqrt2) + 1e-12);
  }
}

TEST(Decompose, ZeroLength) {
  try {
    decompose_direction(0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroLengthSegment);
  }
}

TEST(Extract, SinglePointIsZero) {
  const auto f = extract(make_ink({{{7, 7}}}));
  ASSERT_EQ(f.size(), 512u);
  for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Extract, HorizontalStrokeOnlyDirectionZero) {
  const auto f = extract(make_ink({{{0, 10}, {40, 10}, {100, 10}}}));
  EXPECT_GT(block_sum(f, 0), 0.0);
  for (int d = 1; d < 8; ++d) EXPECT_EQ(block_sum(f, d), 0.0) << d;
}

TEST(Extract, RangeAndPeak) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto f = extract(testing::random_ink(rng));
    double peak = 0;
    for (double v : f) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      peak = std::max(peak, v);
    }
    EXPECT_TRUE(peak == 0.0 || peak == 1.0);
  }
}

TEST(Extract, TranslationAndScaleInvariant) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> c(-200, 200);
  for (int t = 0; t < 50; ++t) {
    InkCharacter ink;
    const int strokes = 1 + t % 5;
    for (int s = 0; s < strokes; ++s) {
      Stroke st;
      for (int p = 0; p < 2 + t % 7; ++p) st.points.push_back(Point{double(c(rng)), double(c(rng))});
      ink.strokes.push_back(st);
    }
    auto moved = ink, scaled = ink;
    for (auto& s : moved.strokes) {
      for (auto& p : s.points) {
        p.x += 512;
        p.y -= 1024;
      }
    }
    for (auto& s : scaled.strokes) {
      for (auto& p : s.points) {
        p.x *= 2;
        p.y *= 2;
      }
    }
    const auto a = extract(ink), b = extract(moved), d = extract(scaled);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-6);
      EXPECT_NEAR(a[i], d[i], 1e-6);
    }
  }
}

TEST(Extract, VirtualSegmentsAddOnlyDirectionMass) {
  // two horizontal strokes joined by a vertical pen-up
  const auto ink = make_ink({{{0, 0}, {100, 0}}, {{100, 60}, {0, 60}}});
  const auto with = extract(ink);
  EightDirConfig off;
  off.virtual_weight = 0.0;
  const auto without = extract(ink, off);
  EXPECT_GT(block_sum(with, 2), 0.0);
  EXPECT_EQ(block_sum(without, 2), 0.0);
  EXPECT_GT(block_sum(without, 0), 0.0);
  EXPECT_GT(block_sum(without, 4), 0.0);
}

TEST(Extract, StrokeOrderMatters) {
  const auto a = make_ink({{{0, 0}, {100, 0}}, {{0, 100}, {100, 100}}});
  const auto b = make_ink({{{0, 100}, {100, 100}}, {{0, 0}, {100, 0}}});
  EXPECT_NE(extract(a), extract(b));
}

}  // namespace
}  // namespace ssdcnn
