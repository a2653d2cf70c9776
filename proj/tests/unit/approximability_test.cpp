#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "polarseg/approximability.hpp"
#include "polarseg/errors.hpp"
#include "polarseg/synthetic.hpp"

using namespace polarseg;
namespace syn = polarseg::synthetic;

namespace {

double inscribed_ratio(int k) { return k / (2 * std::numbers::pi) * std::sin(2 * std::numbers::pi / k); }

// Ratio of an inscribed k-gon to the n-gon used to approximate the circle.
double inscribed_vs_polygon(int k, int n) { return inscribed_ratio(k) / inscribed_ratio(n); }

}  // namespace

TEST(Approximability, SquareK4IsHalfFromAnyStart) {
  const Contour sq = syn::axis_square(3, 5, 10);
  const ApproxResult r = approximability_score(sq, AngleSet(4), 16);
  EXPECT_NEAR(r.score, 0.5, 1e-3);
  const Landscape land = error_landscape(sq, AngleSet(4), 16);
  for (const auto& e : land.errors) {
    ASSERT_TRUE(e.has_value());
    EXPECT_NEAR(*e, 0.5, 1e-3);
  }
}

TEST(Approximability, CircleK32) {
  const Contour c = syn::circle({50, 50}, 20);
  const ApproxResult r = approximability_score(c, AngleSet(32));
  EXPECT_NEAR(r.score, 0.9936, 5e-3);
  // The 360-gon is not exactly round, so the search may beat the centre by a
  // hair and land within a cell of it.
  EXPECT_NEAR(r.score, inscribed_ratio(32), 1e-4);
  EXPECT_NEAR(r.score, inscribed_vs_polygon(32, 360), 1e-4);
  EXPECT_GE(r.score, polar_fit_iou(c, {50, 50}, AngleSet(32)));
  EXPECT_LT(distance(r.optimal_start, {50, 50}), 40.0 / 64);
  EXPECT_EQ(r.search_resolution, 64);
  EXPECT_FALSE(r.fragmented);
}

TEST(Approximability, RepresentableContourScoresOne) {
  const AngleSet angles(8);
  const Polygon p = reconstruct_polygon({{0, 0}, {4, 4, 4, 4, 4, 4, 4, 4}}, angles);
  const Contour c(std::vector<Point2>(p.vertices().begin(), p.vertices().end()));
  const ApproxResult r = approximability_score(c, angles);
  EXPECT_NEAR(r.score, 1.0, 1e-12);
  EXPECT_NEAR(norm(r.optimal_start), 0.0, 1e-9);
}

TEST(Approximability, ResultIsConsistent) {
  syn::Rng rng(1);
  const AngleSet angles(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Contour c = syn::random_star(rng, {50, 50}, 10, 30);
    const ApproxResult r = approximability_score(c, angles, 24);
    EXPECT_TRUE(strictly_inside(c, r.optimal_start));
    EXPECT_NEAR(r.score, exact_polygon_iou(r.optimal_polygon, c).iou, 1e-12);
    EXPECT_EQ(r.optimal_polygon.size(), 16u);
    EXPECT_LE(r.score, 1.0);
    EXPECT_GT(r.score, 0.0);
  }
}

TEST(Approximability, MonotoneInRayCountOnConvexShapes) {
  syn::Rng rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    const Contour c = syn::random_convex(rng, {50, 50}, 10, 40);
    double prev = 0.0;
    for (int k : {4, 8, 16, 32, 64}) {
      const double s = approximability_score(c, AngleSet(k), 24).score;
      EXPECT_GE(s, prev - 1e-3) << "trial " << trial << " K=" << k;
      prev = s;
    }
  }
}

TEST(Approximability, TranslationInvariantScaleEquivariant) {
  syn::Rng rng(3);
  const AngleSet angles(16);
  for (int trial = 0; trial < 6; ++trial) {
    const Contour c = syn::random_star(rng, {40, 40}, 8, 25);
    const ApproxResult base = approximability_score(c, angles, 20);
    const ApproxResult moved = approximability_score(c.translated({16, -8}), angles, 20);
    const ApproxResult scaled = approximability_score(c.scaled(2.0), angles, 20);
    EXPECT_NEAR(moved.score, base.score, 1e-9);
    EXPECT_NEAR(moved.optimal_start.x, base.optimal_start.x + 16, 1e-9);
    EXPECT_NEAR(scaled.score, base.score, 1e-9);
    EXPECT_NEAR(scaled.optimal_start.x, 2 * base.optimal_start.x, 1e-9);
    EXPECT_NEAR(scaled.optimal_start.y, 2 * base.optimal_start.y, 1e-9);
  }
}

TEST(Approximability, LandscapeMinimumMatchesScore) {
  syn::Rng rng(4);
  const AngleSet angles(16);
  for (int trial = 0; trial < 5; ++trial) {
    const Contour c = syn::random_star(rng, {40, 40}, 8, 25);
    const ApproxResult r = approximability_score(c, angles, 24);
    const Landscape land = error_landscape(c, angles, 24);
    ASSERT_TRUE(land.min().has_value());
    EXPECT_GE(*land.min(), 1.0 - r.score - 1e-12);  // refinement can only improve
    EXPECT_NEAR(*land.min(), 1.0 - r.score, 0.02);
  }
}

TEST(Approximability, SliverFallsBackToAnchor) {
  const Contour sliver({{0, 0}, {100, 99}, {100, 100}});
  const ApproxResult r = approximability_score(sliver, AngleSet(8), 4);
  EXPECT_TRUE(strictly_inside(sliver, r.optimal_start));
  EXPECT_GT(r.score, 0.0);
  const Landscape land = error_landscape(sliver, AngleSet(8), 4);
  EXPECT_FALSE(land.min().has_value());
}

TEST(Approximability, FragmentedUsesLargestRing) {
  const std::vector<Contour> rings{syn::axis_square(0, 0, 2), syn::circle({50, 50}, 10)};
  const ApproxResult r = approximability_score(rings, AngleSet(32));
  EXPECT_TRUE(r.fragmented);
  EXPECT_NEAR(r.score, approximability_score(rings[1], AngleSet(32)).score, 0.0);
  EXPECT_THROW(approximability_score(std::span<const Contour>{}, AngleSet(32)), ParameterError);
}

TEST(Approximability, GridValidation) {
  EXPECT_THROW(approximability_score(syn::axis_square(0, 0, 1), AngleSet(4), 3), ParameterError);
  EXPECT_THROW(error_landscape(syn::axis_square(0, 0, 1), AngleSet(4), 2), ParameterError);
}

TEST(Ranking, FullFractionReturnsAllSorted) {
  const auto ids = top_fraction_by_score({{3, 0.5}, {1, 0.9}, {2, 0.7}, {7, 0.9}}, 1.0);
  EXPECT_EQ(ids, (std::vector<InstanceId>{1, 7, 2, 3}));
}

TEST(Ranking, TenthOfTenIsTheBest) {
  std::vector<std::pair<InstanceId, double>> scored;
  for (int i = 0; i < 10; ++i) scored.emplace_back(100 + i, 0.05 * ((i * 7) % 10));
  EXPECT_EQ(top_fraction_by_score(scored, 0.1), (std::vector<InstanceId>{107}));  // (7*7) % 10 = 9
  EXPECT_EQ(top_fraction_by_score(scored, 0.25).size(), 3u);  // ceil(2.5)
}

TEST(Ranking, ValidationAndEmpty) {
  EXPECT_THROW(top_fraction_by_score({{1, 0.5}}, 0.0), ParameterError);
  EXPECT_THROW(top_fraction_by_score({{1, 0.5}}, 1.5), ParameterError);
  EXPECT_TRUE(top_fraction_by_score({}, 0.5).empty());
}

TEST(Ranking, CircleVersusSquareDependsOnRayCount) {
  const std::vector<std::pair<InstanceId, Contour>> inst{{1, syn::axis_square(0, 0, 10)},
                                                         {2, syn::circle({50, 50}, 10)}};
  // Four rays: the square is stuck at 0.5, the circle reaches 2/pi.
  EXPECT_EQ(rank_by_approximability(inst, AngleSet(4), 0.5, 16), (std::vector<InstanceId>{2}));
  // 32 rays include the diagonals, so the square is reproduced exactly from
  // its centre and outranks the circle.
  EXPECT_NEAR(polar_fit_iou(inst[0].second, {5, 5}, AngleSet(32)), 1.0, 1e-12);
  EXPECT_GT(approximability_score(inst[0].second, AngleSet(32)).score, 0.999);
  EXPECT_EQ(rank_by_approximability(inst, AngleSet(32), 1.0, 64, 2), (std::vector<InstanceId>{1, 2}));
}

TEST(Ranking, IndependentOfJobCount) {
  syn::Rng rng(5);
  std::vector<std::pair<InstanceId, Contour>> inst;
  for (int i = 0; i < 12; ++i) inst.emplace_back(i, syn::random_star(rng, {30, 30}, 5, 20));
  const auto a = rank_by_approximability(inst, AngleSet(16), 1.0, 12, 1);
  const auto b = rank_by_approximability(inst, AngleSet(16), 1.0, 12, 4);
  EXPECT_EQ(a, b);
}

TEST(Landscape, RegularPolygonMinimumAtCentroid) {
  const Contour c = syn::regular_polygon({0, 0}, 10, 8);
  const Landscape land = error_landscape(c, AngleSet(8), 8);  // even grid: no point at the centroid
  const Landscape odd = error_landscape(c, AngleSet(8), 9);
  EXPECT_GT(*land.min(), 0.0);
  EXPECT_NEAR(*odd.min(), 0.0, 1e-12);
  EXPECT_NEAR(*odd.at(4, 4), 0.0, 1e-12);
}

TEST(Landscape, UShapeIsNonUniform) {
  const Landscape land = error_landscape(syn::u_shape(), AngleSet(32), 64);
  ASSERT_TRUE(land.min() && land.max());
  EXPECT_GT(*land.max() - *land.min(), 0.1);
  // Lattice points in the notch are absent.
  std::size_t absent = 0;
  for (const auto& e : land.errors) absent += e ? 0 : 1;
  EXPECT_GT(absent, 0u);
}

TEST(Landscape, ExportFormats) {
  const Landscape land = error_landscape(syn::u_shape(), AngleSet(4), 4);
  std::ostringstream csv;
  write_landscape_csv(land, csv);
  const std::string s = csv.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
  EXPECT_EQ(std::count(s.begin(), s.end(), ','), 12);
  std::ostringstream pgm;
  write_landscape_pgm(land, pgm);
  const std::string p = pgm.str();
  ASSERT_EQ(p.rfind("P5\n4 4\n255\n", 0), 0u);
  EXPECT_EQ(p.size(), std::string("P5\n4 4\n255\n").size() + 16);
}
