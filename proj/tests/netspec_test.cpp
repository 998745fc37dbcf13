#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace ssdcnn {
namespace {

const std::string kSsdcnn8 =
    "28*32*32 -100C3ReLU -MP2 -100C2ReLU -MP2 -100C2ReLU -MP2 -200C2ReLU -MP2 -N100Sig -N3755";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::Io;
}

TEST(Parse, Ssdcnn8String) {
  const auto spec = parse_netspec(kSsdcnn8);
  EXPECT_EQ(spec.input_shape, (Shape{28, 32, 32}));
  ASSERT_EQ(spec.layers.size(), 10u);
  EXPECT_EQ(spec.layers[0], LayerDesc::conv(100, 3));
  EXPECT_EQ(spec.layers[1], LayerDesc::max_pool(2));
  EXPECT_EQ(spec.layers[8], LayerDesc::full(100, Activation::Sigmoid));
  EXPECT_EQ(spec.layers[9], LayerDesc::full(3755, Activation::Linear));
}

TEST(Parse, Nn8String) {
  const auto spec = parse_netspec("512 -N300Sig -N200Sig -N3755");
  EXPECT_EQ(spec.input_shape, (Shape{512}));
  ASSERT_EQ(spec.layers.size(), 3u);
  for (const auto& l : spec.layers) EXPECT_EQ(l.kind, LayerKind::Full);
  EXPECT_EQ(spec.layers[2].activation, Activation::Linear);
}

TEST(Parse, SyntaxErrorPointsAtOffendingCharacter) {
  try {
    parse_netspec("32*32 -MPX");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_EQ(e.index(), 9u);
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);
  }
}

TEST(Parse, Errors) {
  EXPECT_EQ(code_of([] { parse_netspec(""); }), ErrorCode::EmptySpec);
  EXPECT_EQ(code_of([] { parse_netspec("   "); }), ErrorCode::EmptySpec);
  EXPECT_EQ(code_of([] { parse_netspec("32*"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_netspec("32 -3C3"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_netspec("32 N3"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_netspec("0 -N3"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_netspec("1*2*3*4"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_netspec("99999999999 -N3"); }), ErrorCode::SyntaxError);
}

TEST(Parse, WhitespaceTolerant) {
  EXPECT_EQ(parse_netspec("  28 * 32*32\t-100C3ReLU   - MP2 -N5 "),
            parse_netspec("28*32*32 -100C3ReLU -MP2 -N5"));
}

TEST(InferShapes, Ssdcnn8Chain) {
  const auto chain = infer_shapes(parse_netspec(kSsdcnn8));
  const std::vector<Shape> want = {{28, 32, 32}, {100, 30, 30}, {100, 15, 15}, {100, 14, 14},
                                   {100, 7, 7},  {100, 6, 6},   {100, 3, 3},   {200, 2, 2},
                                   {200, 1, 1},  {100},         {3755}};
  EXPECT_EQ(chain, want);
}

TEST(InferShapes, TwoDimensionalInputIsOneChannel) {
  EXPECT_EQ(infer_shapes(parse_netspec("32*32 -MP2")).back(), (Shape{1, 16, 16}));
}

TEST(InferShapes, Errors) {
  try {
    infer_shapes(parse_netspec("32*32 -MP5"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeError);
    EXPECT_EQ(e.index(), 0u);
  }
  try {
    infer_shapes(parse_netspec("4*4 -MP2 -100C5ReLU"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeError);
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_EQ(code_of([] { infer_shapes(parse_netspec("4*4 -100C5ReLU")); }), ErrorCode::ShapeError);
  EXPECT_EQ(code_of([] { infer_shapes(parse_netspec("16 -3C2ReLU")); }), ErrorCode::ShapeError);
  EXPECT_EQ(code_of([] { infer_shapes(parse_netspec("16 -N4 -MP2")); }), ErrorCode::ShapeError);
}

TEST(Render, PaperStringsRoundTrip) {
  const std::vector<std::string> all = {
      default_architecture(ModelKind::IMDCNN, 3755)[0], kSsdcnn8, "512 -N300Sig -N200Sig -N3755",
      default_architecture(ModelKind::SSDCNN, 3755)[0], "512 -N512Sig", "712 -N300Sig -N200Sig -N3755"};
  for (const auto& s : all) {
    EXPECT_EQ(render(parse_netspec(s)), s);
    EXPECT_NO_THROW(infer_shapes(parse_netspec(s)));
  }
}

TEST(Render, ProgrammaticSpec) {
  NetSpec spec{{3, 8, 8}, {LayerDesc::conv(4, 3), LayerDesc::max_pool(2), LayerDesc::full(7, Activation::Sigmoid),
                           LayerDesc::full(2, Activation::Linear)}};
  EXPECT_EQ(render(spec), "3*8*8 -4C3ReLU -MP2 -N7Sig -N2");
  EXPECT_EQ(parse_netspec(render(spec)), spec);
}

NetSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 9), kind(0, 2);
  NetSpec s;
  const int dims = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < dims; ++i) s.input_shape.push_back(small(rng) * 4);
  const int n = static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    switch (kind(rng)) {
      case 0: s.layers.push_back(LayerDesc::conv(small(rng), small(rng))); break;
      case 1: s.layers.push_back(LayerDesc::max_pool(small(rng))); break;
      default:
        s.layers.push_back(LayerDesc::full(small(rng) * 10, rng() % 2 ? Activation::Sigmoid : Activation::Linear));
    }
  }
  return s;
}

TEST(Render, RandomSpecsRoundTripAndShapeCheckTotally) {
  std::mt19937_64 rng(77);
  int ok = 0;
  for (int t = 0; t < 2000; ++t) {
    const NetSpec s = random_spec(rng);
    EXPECT_EQ(parse_netspec(render(s)), s);
    try {
      const auto chain = infer_shapes(s);
      EXPECT_EQ(chain.size(), s.layers.size() + 1);
      ++ok;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ShapeError);
      EXPECT_LT(e.index(), s.layers.size());
    }
  }
  EXPECT_GT(ok, 0);
}

}  // namespace
}  // namespace ssdcnn
