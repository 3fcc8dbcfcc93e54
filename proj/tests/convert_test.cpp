#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ddes/convert.hpp"
#include "test_support.hpp"

using namespace ddes;
using testing_support::Random;
using testing_support::set_from_points;

namespace {

ConversionParams with_sigma(double sigma) {
  ConversionParams p;
  p.sigma = sigma;
  return p;
}

EmotionSetPtr content_sad() {
  return make_emotion_set("cs", {{"contentment", VAPoint(0.75, 0.22)}, {"sadness", VAPoint(-0.896, -0.424)}});
}

std::size_t cell_containing(const GridGeometry& g, const VAPoint& p) {
  const auto col = std::min<std::size_t>(static_cast<std::size_t>((p.valence() + 1) / 2 * g.width()), g.width() - 1);
  const auto row = std::min<std::size_t>(static_cast<std::size_t>((1 - p.arousal()) / 2 * g.height()), g.height() - 1);
  return row * g.width() + col;
}

}  // namespace

TEST(CesToDes, Examples) {
  const auto set = content_sad();
  EXPECT_EQ(ces_to_des(make_categorical(set, std::vector<double>{1, 0})), VAPoint(0.75, 0.22));
  const auto mid = ces_to_des(make_categorical(set, std::vector<double>{1, 1}));
  EXPECT_NEAR(mid.valence(), -0.073, 1e-12);
  EXPECT_NEAR(mid.arousal(), -0.102, 1e-12);
  const auto sym = set_from_points({{0.6, 0}, {-0.6, 0}});
  const auto zero = ces_to_des(make_categorical(sym, std::vector<double>{1, 1}));
  EXPECT_NEAR(zero.valence(), 0.0, 1e-15);
  EXPECT_NEAR(zero.arousal(), 0.0, 1e-15);
}

TEST(CesToCes, IdenticalSetsNearIdentity) {
  const auto set = testing_support::mikels();
  Random rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = make_categorical(set, rng.simplex(set->size()));
    const auto q = ces_to_ces(p, set);
    for (std::size_t i = 0; i < set->size(); ++i) EXPECT_LT(std::abs(q[i] - p[i]), 1e-3);
  }
}

TEST(CesToCes, OneHotPrefersCoincidentTarget) {
  const auto src = set_from_points({{0.3, 0.3}, {-0.6, 0.1}});
  const auto dst = set_from_points({{0.9, 0.9}, {0.3, 0.3}, {-0.2, -0.5}}, "t");
  const auto q = ces_to_ces(make_categorical(src, std::vector<double>{1, 0}), dst);
  EXPECT_EQ(q.argmax(), 1u);
}

TEST(CesToCes, TwoToThreeMatchesFrozenOracle) {
  const auto src = set_from_points({{1, 0}, {-1, 0}});
  const auto dst = set_from_points({{1, 0}, {0, 0}, {-1, 0}}, "t");
  const auto q = ces_to_ces(make_categorical(src, std::vector<double>{0.7, 0.3}), dst);
  // High-precision evaluation of the double-sum ratio.
  EXPECT_NEAR(q[0], 0.69999910000214999, 1e-12);
  EXPECT_NEAR(q[1], 9.9999750000599999e-7, 1e-12);
  EXPECT_NEAR(q[2], 0.29999990000035, 1e-12);
  const auto o = oracle::inverse_distance({0.7, 0.3}, {{1, 0}, {-1, 0}}, {{1, 0}, {0, 0}, {-1, 0}}, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(q[i], o[i], 1e-12);
}

TEST(CesToDdes, OneHotPeaksAtAnchorCell) {
  const auto set = testing_support::mikels();
  const GridGeometry g = GridGeometry::square(28);
  for (std::size_t i = 0; i < set->size(); ++i) {
    std::vector<double> w(set->size(), 0.0);
    w[i] = 1.0;
    const auto grid = ces_to_ddes(make_categorical(set, w), g, with_sigma(0.1));
    EXPECT_EQ(grid.argmax(), cell_containing(g, (*set)[i].anchor)) << (*set)[i].label;
    EXPECT_NEAR(ordered_sum(grid.values()), 1.0, 1e-12);
  }
}

TEST(CesToDdes, MatchesDenseOracle4x4) {
  const auto set = set_from_points({{0.2, -0.3}, {-0.6, 0.5}});
  const auto grid = ces_to_ddes(make_categorical(set, std::vector<double>{0.35, 0.65}), GridGeometry(4, 4), with_sigma(0.5));
  const auto expected = oracle::gaussian_grid(4, 4, {{0.2, -0.3}, {-0.6, 0.5}}, {0.35, 0.65}, 0.5);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(grid.values()[k], expected[k], 1e-9);
}

TEST(CesToDdes, AutoSigmaUsesScottOverWeightedAnchors) {
  const auto set = testing_support::mikels();
  Random rng(32);
  const auto p = make_categorical(set, rng.simplex(set->size()));
  std::vector<VAPoint> anchors;
  for (const auto& e : set->emotions()) anchors.push_back(e.anchor);
  const WeightedPointCloud cloud(anchors, {p.probs().begin(), p.probs().end()});
  const auto expected = kde_to_grid(cloud, GridGeometry::square(28), scott_bandwidth(cloud));
  const auto grid = ces_to_ddes(p, GridGeometry::square(28));
  for (std::size_t k = 0; k < expected.values().size(); ++k) EXPECT_EQ(grid.values()[k], expected.values()[k]);
}

TEST(CesToDdes, RejectsNonPositiveSigma) {
  const auto set = content_sad();
  try {
    ces_to_ddes(make_categorical(set, std::vector<double>{1, 1}), GridGeometry(4, 4), with_sigma(-0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SigmaNonPositive);
  }
}

TEST(DesToCes, Examples) {
  const auto set = testing_support::mikels();
  for (std::size_t i = 0; i < set->size(); ++i) {
    const auto p = des_to_ces((*set)[i].anchor, set);
    for (std::size_t j = 0; j < set->size(); ++j) {
      if (j != i) EXPECT_GT(p[i], p[j]);
    }
  }
  const auto pair = set_from_points({{0.5, 0.2}, {-0.5, 0.2}});
  const auto half = des_to_ces(VAPoint(0.0, -0.7), pair);
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  EXPECT_DOUBLE_EQ(half[1], 0.5);

  const auto line = set_from_points({{1, 0}, {-1, 0}});
  const auto p = des_to_ces(VAPoint(0.5, 0), line);
  EXPECT_NEAR(p[1], 2.0611536181902036e-9, 1e-20);
  EXPECT_NEAR(p[0], 1.0 - 2.0611536181902036e-9, 1e-15);
}

TEST(DesToCes, StableForHugeSharpness) {
  const auto line = set_from_points({{1, 0}, {-1, 0}});
  ConversionParams params;
  params.sharpness_k = 1e6;
  const auto p = des_to_ces(VAPoint(0.9, 0.0), line, params);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(DesToDdes, Examples) {
  const GridGeometry g = GridGeometry::square(28);
  const auto at_center = des_to_ddes(cell_center(g, 5, 17), g, with_sigma(0.1));
  EXPECT_EQ(at_center.argmax(), 5u * 28 + 17);

  const auto origin = des_to_ddes(VAPoint(0, 0), g, with_sigma(0.2));
  for (std::size_t i = 0; i < 28; ++i) {
    for (std::size_t j = 0; j < 28; ++j) EXPECT_NEAR(origin.at(i, j), origin.at(27 - i, 27 - j), 1e-12);
  }

  const auto grid = des_to_ddes(VAPoint(0.3, -0.4), g, with_sigma(0.15));
  const auto expected = oracle::gaussian_grid(28, 28, {{0.3, -0.4}}, {1.0}, 0.15);
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(grid.values()[k], expected[k], 1e-9);
}

TEST(DesToDdes, AutoSigmaFallsBackToPointOne) {
  const GridGeometry g = GridGeometry::square(28);
  const auto a = des_to_ddes(VAPoint(0.1, 0.2), g);
  const auto b = des_to_ddes(VAPoint(0.1, 0.2), g, with_sigma(kFallbackSigma));
  for (std::size_t k = 0; k < g.cells(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
}

TEST(DdesToCes, Examples) {
  const auto set = testing_support::mikels();
  const GridGeometry g = GridGeometry::square(28);
  for (std::size_t i = 0; i < set->size(); ++i) {
    const auto grid = des_to_ddes((*set)[i].anchor, g, with_sigma(0.15));
    EXPECT_EQ(ddes_to_ces(grid, set).argmax(), i) << (*set)[i].label;
  }
  const auto uniform = ddes_to_ces(uniform_grid(g), testing_support::wikiart20());
  for (double p : uniform.probs()) EXPECT_NEAR(p, 1.0 / 20.0, 1e-15);

  const auto hand = DensityGrid::from_normalized(GridGeometry(2, 2), {0.1, 0.2, 0.3, 0.4});
  const auto corners = set_from_points({{-0.5, 0.5}, {0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}});
  const auto p = ddes_to_ces(hand, corners);
  EXPECT_NEAR(p[0], 0.1, 1e-15);
  EXPECT_NEAR(p[1], 0.2, 1e-15);
  EXPECT_NEAR(p[2], 0.3, 1e-15);
  EXPECT_NEAR(p[3], 0.4, 1e-15);
}

TEST(DdesToCes, ZeroMassAtAnchorsIsAnError) {
  const auto grid = make_grid(GridGeometry(4, 4), {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto far = set_from_points({{0.75, -0.75}});
  try {
    ddes_to_ces(grid, far);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroTotalMass);
  }
}

TEST(SharpenGrid, Examples) {
  const GridGeometry g(5, 3);
  const auto u = sharpen_grid(uniform_grid(g));
  for (double v : u.values()) EXPECT_NEAR(v, 1.0 / 15.0, 1e-15);

  Random rng(33);
  std::vector<double> raw(g.cells());
  for (auto& x : raw) x = rng.uniform(1e-3, 1);
  const auto grid = make_grid(g, raw);
  ConversionParams identity;
  identity.temperature_tau = 1.0;
  identity.epsilon_temp = 1e-300;
  const auto same = sharpen_grid(grid, identity);
  for (std::size_t k = 0; k < g.cells(); ++k) EXPECT_NEAR(same.values()[k], grid.values()[k], 1e-9);

  const auto two = DensityGrid::from_normalized(GridGeometry(2, 2), {0.8, 0.2, 0.0, 0.0});
  const auto sharp = sharpen_grid(two);
  // (0.2 / 0.8)^20 = 4^-20, evaluated with the 1e-12 offsets at high precision.
  EXPECT_NEAR(sharp.values()[1], 9.0949470184031316e-13, 1e-24);
  EXPECT_NEAR(sharp.values()[0], 0.99999999999909051, 1e-15);
}

TEST(SharpenGrid, MatchesDirectPowerOracle) {
  Random rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = rng.index(2, 8), w = rng.index(2, 8);
    std::vector<double> raw(h * w);
    for (auto& x : raw) x = rng.uniform(0, 1);
    const auto grid = make_grid(GridGeometry(h, w), raw);
    ConversionParams params;
    params.temperature_tau = rng.uniform(0.05, 1.0);
    const auto got = sharpen_grid(grid, params);
    const auto expected = oracle::sharpen({grid.values().begin(), grid.values().end()}, params.temperature_tau, 1e-12);
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(got.values()[k], expected[k], 1e-9);
  }
}

TEST(SharpenGrid, NoOverflowForTinyTemperature) {
  ConversionParams params;
  params.temperature_tau = 1e-4;
  const auto grid = make_grid(GridGeometry(2, 2), {0.3, 0.29, 0.21, 0.2});
  const auto sharp = sharpen_grid(grid, params);
  EXPECT_EQ(sharp.values()[0], 1.0);
  EXPECT_TRUE(std::isfinite(sharp.values()[1]));
}

TEST(DdesToDes, Examples) {
  const GridGeometry g(6, 6);
  std::vector<double> raw(36, 0.0);
  raw[2 * 6 + 4] = 1.0;
  EXPECT_EQ(ddes_to_des(make_grid(g, raw)), cell_center(g, 2, 4));
  const auto c = ddes_to_des(uniform_grid(GridGeometry::square(28)));
  EXPECT_NEAR(c.valence(), 0.0, 1e-12);
  EXPECT_NEAR(c.arousal(), 0.0, 1e-12);
}

TEST(DdesToDes, RoundTripWithinOneAndAHalfCells) {
  const GridGeometry g = GridGeometry::square(28);
  for (int a = 0; a < 9; ++a) {
    for (int b = 0; b < 9; ++b) {
      const VAPoint p(-0.8 + 0.2 * a, -0.8 + 0.2 * b);
      const auto back = ddes_to_des(des_to_ddes(p, g, with_sigma(0.15)));
      EXPECT_LT(std::hypot(back.valence() - p.valence(), back.arousal() - p.arousal()), 0.107);
    }
  }
}

TEST(DdesToDes, RoundTripErrorShrinksWithResolution) {
  Random rng(35);
  const auto pts = rng.points(60, 0.8);
  double previous = 1e9;
  for (std::size_t n : {14u, 28u, 56u}) {
    double total = 0.0;
    for (const auto& p : pts) {
      const auto back = ddes_to_des(des_to_ddes(VAPoint(p.v, p.a), GridGeometry::square(n), with_sigma(0.15)));
      total += std::hypot(back.valence() - p.v, back.arousal() - p.a);
    }
    const double mean = total / static_cast<double>(pts.size());
    EXPECT_LT(mean, previous) << n;
    previous = mean;
  }
}

TEST(ConversionParams, Validation) {
  ConversionParams p;
  p.temperature_tau = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.epsilon_dist = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.sharpness_k = -1;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_NO_THROW(ConversionParams{}.validate());
}

TEST(Convert, PropertyArgmaxInvariances) {
  Random rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const auto anchors = rng.points(rng.index(2, 12));
    const auto set = set_from_points(anchors);
    const auto x = rng.point();
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
      if (std::hypot(x.v - anchors[i].v, x.a - anchors[i].a) <
          std::hypot(x.v - anchors[nearest].v, x.a - anchors[nearest].a)) {
        nearest = i;
      }
    }
    for (double k : {0.1, 1.0, 10.0, 100.0}) {
      ConversionParams params;
      params.sharpness_k = k;
      EXPECT_EQ(des_to_ces(VAPoint(x.v, x.a), set, params).argmax(), nearest);
    }
  }
}

TEST(Convert, PropertyOracleEquivalenceSmallGrids) {
  Random rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t h = rng.index(2, 8), w = rng.index(2, 8);
    const auto anchors = rng.points(rng.index(1, 20));
    const auto set = set_from_points(anchors);
    const auto probs = rng.simplex(anchors.size(), true);
    const auto state = make_categorical(set, probs);
    const double sigma = rng.uniform(0.05, 0.8);

    const auto grid = ces_to_ddes(state, GridGeometry(h, w), with_sigma(sigma));
    const auto expected = oracle::gaussian_grid(h, w, anchors, {state.probs().begin(), state.probs().end()}, sigma);
    for (std::size_t k = 0; k < expected.size(); ++k) ASSERT_NEAR(grid.values()[k], expected[k], 1e-9);

    const auto target_pts = rng.points(rng.index(1, 20));
    const auto q = ces_to_ces(state, set_from_points(target_pts, "t"));
    const auto qo = oracle::inverse_distance({state.probs().begin(), state.probs().end()}, anchors, target_pts, 1e-6);
    for (std::size_t i = 0; i < qo.size(); ++i) ASSERT_NEAR(q[i], qo[i], 1e-9);
  }
}
