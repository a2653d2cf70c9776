#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polarseg/errors.hpp"
#include "polarseg/geometry.hpp"
#include "polarseg/synthetic.hpp"

using namespace polarseg;
namespace syn = polarseg::synthetic;

namespace {

Polygon square_poly(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

void expect_point(Point2 actual, Point2 expected, double tol = 1e-12) {
  EXPECT_NEAR(actual.x, expected.x, tol);
  EXPECT_NEAR(actual.y, expected.y, tol);
}

}  // namespace

TEST(AngleSet, UniformAnglesFromZero) {
  const AngleSet angles(8);
  ASSERT_EQ(angles.size(), 8);
  for (int k = 0; k < 8; ++k) {
    EXPECT_DOUBLE_EQ(angles.theta(k), 2.0 * std::numbers::pi * k / 8);
    EXPECT_NEAR(norm(angles.direction(k)), 1.0, 1e-15);
  }
  expect_point(angles.direction(2), {0.0, 1.0}, 0.0);
  expect_point(angles.direction(4), {-1.0, 0.0}, 0.0);
}

TEST(AngleSet, RejectsTooFewRays) {
  EXPECT_THROW(AngleSet(2), ParameterError);
  EXPECT_THROW(AngleSet(0), ParameterError);
}

TEST(AngleSet, PhaseShiftsEveryRay) {
  const AngleSet angles(4, 0.25);
  EXPECT_DOUBLE_EQ(angles.theta(0), 0.25);
  EXPECT_NEAR(angles.direction(0).x, std::cos(0.25), 1e-15);
}

TEST(Reconstruct, AxisSymmetricSquare) {
  const Polygon p = reconstruct_polygon({{1, 1}, {2, 2, 2, 2}}, AngleSet(4));
  ASSERT_EQ(p.size(), 4u);
  expect_point(p[0], {3, 1});
  expect_point(p[1], {1, 3});
  expect_point(p[2], {-1, 1});
  expect_point(p[3], {1, -1});
}

TEST(Reconstruct, UnitDiamondArea) {
  EXPECT_DOUBLE_EQ(polygon_area(reconstruct_polygon({{0, 0}, {1, 1, 1, 1}}, AngleSet(4))), 2.0);
}

TEST(Reconstruct, Regular32GonArea) {
  const Polygon p = reconstruct_polygon({{10, 10}, std::vector<double>(32, 5.0)}, AngleSet(32));
  ASSERT_EQ(p.size(), 32u);
  // Oracle: independent shoelace on the returned vertices, and the closed form.
  const double closed = 16.0 * 25.0 * std::sin(2.0 * std::numbers::pi / 32.0);
  EXPECT_NEAR(std::abs(oracle::shoelace(p.vertices())), closed, 1e-9);
  EXPECT_NEAR(polygon_area(p), closed, 1e-9);
  EXPECT_NEAR(polygon_area(p), 78.0361, 1e-4);
}

TEST(Reconstruct, ZeroDistancesCollapseOntoPole) {
  const Polygon p = reconstruct_polygon({{3, 4}, {0, 0, 0, 0}}, AngleSet(4));
  for (const Point2& v : p.vertices()) expect_point(v, {3, 4}, 0.0);
  EXPECT_EQ(polygon_area(p), 0.0);
}

TEST(Reconstruct, DimensionMismatchThrows) {
  EXPECT_THROW(reconstruct_polygon({{0, 0}, {1, 1, 1}}, AngleSet(4)), DimensionError);
}

TEST(Reconstruct, NegativeDistanceThrows) {
  EXPECT_THROW(reconstruct_polygon({{0, 0}, {1, -1, 1, 1}}, AngleSet(4)), ParameterError);
}

TEST(Reconstruct, TranslationEquivariant) {
  syn::Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const AngleSet angles(16);
  for (int trial = 0; trial < 50; ++trial) {
    PolarParams p{{u(rng), u(rng)}, {}};
    for (int k = 0; k < 16; ++k) p.distances.push_back(u(rng));
    const Point2 t{u(rng) - 5.0, u(rng) - 5.0};
    const Polygon a = reconstruct_polygon(p, angles);
    const Polygon b = reconstruct_polygon({p.start + t, p.distances}, angles);
    ASSERT_EQ(a.size(), 16u);
    for (std::size_t i = 0; i < a.size(); ++i) expect_point(b[i], a[i] + t, 1e-12);
  }
}

TEST(ContourTest, NormalizesToCounterClockwise) {
  const Contour c({{0, 0}, {0, 4}, {4, 4}, {4, 0}});
  EXPECT_GT(signed_area(c.vertices()), 0.0);
  EXPECT_DOUBLE_EQ(c.area(), 16.0);
}

TEST(ContourTest, DropsRepeatedVerticesKeepsCollinear) {
  const Contour c({{0, 0}, {0, 0}, {2, 0}, {4, 0}, {4, 4}, {4, 4 + 1e-12}, {0, 4}, {0, 0}});
  EXPECT_EQ(c.size(), 5u);
}

TEST(ContourTest, RejectsInvalidRings) {
  EXPECT_THROW(Contour({{0, 0}, {1, 1}}), GeometryError);
  EXPECT_THROW(Contour({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
  EXPECT_THROW(Contour({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), GeometryError);  // bow tie
  EXPECT_THROW(Contour({{0, 0}, {NAN, 1}, {1, 0}}), GeometryError);
}

TEST(RayIntersect, CenteredSquare) {
  const Contour sq = syn::axis_square(0, 0, 4);
  const auto d = ray_contour_intersect(sq, {2, 2}, AngleSet(4));
  EXPECT_EQ(d, (std::vector<double>{2, 2, 2, 2}));
}

TEST(RayIntersect, OffCenterSquare) {
  const Contour sq = syn::axis_square(0, 0, 4);
  const auto d = ray_contour_intersect(sq, {1, 2}, AngleSet(4));
  EXPECT_EQ(d, (std::vector<double>{3, 2, 1, 2}));
}

TEST(RayIntersect, UShapeTakesFarthestExit) {
  const Contour u = syn::u_shape();
  const auto d = ray_contour_intersect(u, {0.5, 3}, AngleSet(4));
  EXPECT_NEAR(d[0], 4.5, 1e-12);
  const auto v = u.vertices();
  EXPECT_NEAR(oracle::march_farthest_exit(v, {0.5, 3}, {1, 0}), 4.5, 1e-6);
}

TEST(RayIntersect, OutsideOrBoundaryStartThrows) {
  const Contour sq = syn::axis_square(0, 0, 4);
  EXPECT_THROW(ray_contour_intersect(sq, {5, 5}, AngleSet(4)), DomainError);
  EXPECT_THROW(ray_contour_intersect(sq, {0, 2}, AngleSet(4)), DomainError);
  try {
    ray_contour_intersect(sq, {7.5, 1}, AngleSet(4));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("7.5"), std::string::npos);
  }
}

TEST(RayIntersect, CollinearEdgeCountsFarEndpoint) {
  // Ray along y = 0 from (1, 0)... start must be interior, so use a ring
  // whose edge lies on the ray: the ray from (1,1) at theta=0 runs along
  // the top edge segment from (2,1) to (3,1) before reaching x = 4.
  const Contour c({{0, 0}, {4, 0}, {4, 2}, {3, 2}, {3, 1}, {2, 1}, {2, 2}, {0, 2}});
  const auto d = ray_contour_intersect(c, {1, 1.5}, AngleSet(4));
  EXPECT_NEAR(d[0], 3.0, 1e-12);
  EXPECT_NEAR(farthest_ray_hit(c.vertices(), {0.5, 1}, {1, 0}), 3.5, 1e-12);
}

TEST(RayIntersect, RoundTripVerticesOnBoundary) {
  syn::Rng rng(11);
  const AngleSet angles(32);
  for (int trial = 0; trial < 200; ++trial) {
    const Contour c = syn::random_convex(rng, {50, 50}, 10, 40);
    const Point2 s = syn::random_interior_point(rng, c);
    const Polygon p = reconstruct_polygon({s, ray_contour_intersect(c, s, angles)}, angles);
    ASSERT_EQ(p.size(), 32u);
    for (const Point2& v : p.vertices()) ASSERT_LT(distance_to_boundary(c.vertices(), v), 1e-6);
  }
}

TEST(RayIntersect, AgreesWithDenseMarching) {
  syn::Rng rng(12);
  const AngleSet angles(8);
  for (int trial = 0; trial < 60; ++trial) {
    const Contour c = syn::random_star(rng, {30, 30}, 3, 20);
    const Point2 s = syn::random_interior_point(rng, c);
    const auto d = ray_contour_intersect(c, s, angles);
    for (int k = 0; k < angles.size(); ++k) {
      EXPECT_NEAR(d[static_cast<std::size_t>(k)], oracle::march_farthest_exit(c.vertices(), s, angles.direction(k)),
                  1e-4);
      EXPECT_GT(d[static_cast<std::size_t>(k)], 0.0);
    }
  }
}

TEST(RayIntersect, TranslationEquivariant) {
  syn::Rng rng(13);
  const AngleSet angles(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Contour c = syn::random_star(rng, {20, 20}, 4, 15);
    const Point2 s = syn::random_interior_point(rng, c);
    const Point2 t{37.25, -12.5};
    const auto a = ray_contour_intersect(c, s, angles);
    const auto b = ray_contour_intersect(c.translated(t), s + t, angles);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
  }
}

TEST(PointInContour, Basics) {
  const Contour sq = syn::axis_square(0, 0, 4);
  EXPECT_TRUE(point_in_contour(sq, {2, 2}));
  EXPECT_FALSE(point_in_contour(sq, {5, 5}));
  EXPECT_FALSE(point_in_contour(syn::u_shape(), {2.5, 3}));
}

TEST(PointInContour, BoundaryCountsAsInside) {
  const Contour sq = syn::axis_square(0, 0, 4);
  EXPECT_TRUE(point_in_contour(sq, {0, 2}));
  EXPECT_TRUE(point_in_contour(sq, {4, 4}));
  EXPECT_TRUE(point_in_contour(sq, {4 + 5e-10, 2}));
  EXPECT_FALSE(point_in_contour(sq, {4 + 1e-6, 2}));
  EXPECT_FALSE(strictly_inside(sq, {0, 2}));
  EXPECT_EQ(locate(sq.vertices(), {0, 2}), Location::kBoundary);
}

TEST(PointInContour, AgreesWithCrossingNumber) {
  syn::Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Contour c = syn::random_star(rng, {30, 30}, 3, 28);
    for (int i = 0; i < 50; ++i) {
      const Point2 p{u(rng), u(rng)};
      if (distance_to_boundary(c.vertices(), p) < 1e-7) continue;
      ASSERT_EQ(point_in_contour(c, p), oracle::crossing_inside(c.vertices(), p));
      ++checked;
    }
  }
  EXPECT_GT(checked, 9000);
}

TEST(PolygonArea, Examples) {
  EXPECT_DOUBLE_EQ(polygon_area(square_poly(0, 0, 2, 2)), 4.0);
  EXPECT_DOUBLE_EQ(polygon_area(Polygon({{0, 0}, {4, 0}, {0, 3}})), 6.0);
  EXPECT_DOUBLE_EQ(polygon_area(Polygon({{0, 0}, {0, 3}, {4, 0}})), 6.0);
}

TEST(ExactIou, Examples) {
  EXPECT_DOUBLE_EQ(exact_polygon_iou(square_poly(0, 0, 2, 2), square_poly(0, 0, 2, 2)).iou, 1.0);
  EXPECT_NEAR(exact_polygon_iou(square_poly(0, 0, 2, 2), square_poly(1, 0, 3, 2)).iou, 1.0 / 3.0, 1e-15);
  const Polygon diamond = reconstruct_polygon({{0, 0}, {1, 1, 1, 1}}, AngleSet(4));
  EXPECT_NEAR(exact_polygon_iou(diamond, square_poly(-1, -1, 1, 1)).iou, 0.5, 1e-15);
  EXPECT_NEAR(oracle::boost_iou(diamond.vertices(), square_poly(-1, -1, 1, 1).vertices()), 0.5, 1e-12);
}

TEST(ExactIou, DisjointAndTouching) {
  EXPECT_EQ(exact_polygon_iou(square_poly(0, 0, 1, 1), square_poly(3, 3, 4, 4)).iou, 0.0);
  EXPECT_EQ(exact_polygon_iou(square_poly(0, 0, 1, 1), square_poly(1, 0, 2, 1)).iou, 0.0);
}

TEST(ExactIou, ContainedAndSharedEdges) {
  EXPECT_NEAR(exact_polygon_iou(square_poly(0, 0, 4, 4), square_poly(1, 1, 2, 2)).iou, 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(exact_polygon_iou(square_poly(0, 0, 4, 4), square_poly(0, 0, 2, 4)).iou, 0.5, 1e-15);
  EXPECT_NEAR(exact_polygon_iou(square_poly(0, 0, 4, 4), square_poly(0, 0, 4, 2)).iou, 0.5, 1e-15);
}

TEST(ExactIou, DegenerateInputFlagged) {
  const Polygon flat({{0, 0}, {1, 0}, {2, 0}});
  const IouResult r = exact_polygon_iou(flat, square_poly(0, 0, 1, 1));
  EXPECT_EQ(r.iou, 0.0);
  EXPECT_TRUE(r.degenerate);
  const Polygon collapsed = reconstruct_polygon({{0.5, 0.5}, {0, 0, 0, 0}}, AngleSet(4));
  EXPECT_TRUE(exact_polygon_iou(collapsed, square_poly(0, 0, 1, 1)).degenerate);
}

TEST(ExactIou, AgreesWithBoostOnRandomStars) {
  syn::Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Contour a = syn::random_star(rng, {20, 20}, 3, 15);
    const Contour b = syn::random_star(rng, {25, 22}, 3, 15);
    const double ours = exact_polygon_iou(a.polygon(), b).iou;
    // Boost's set operations snap to an integer grid internally.
    ASSERT_NEAR(ours, oracle::boost_iou(a.vertices(), b.vertices()), 1e-6) << "trial " << trial;
  }
}

TEST(ExactIou, AgreesWithConvexClipping) {
  syn::Rng rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const Contour a = syn::random_convex(rng, {20, 20}, 3, 15);
    const Contour b = syn::random_convex(rng, {24, 21}, 3, 15);
    const double inter = oracle::convex_intersection_area(a.vertices(), b.vertices());
    const double expected = inter / (a.area() + b.area() - inter);
    ASSERT_NEAR(exact_polygon_iou(a.polygon(), b).iou, expected, 1e-9);
  }
}

TEST(ExactIou, SymmetricAndBoundedByAreaRatio) {
  syn::Rng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const Contour a = syn::random_star(rng, {20, 20}, 3, 15);
    const Contour b = syn::random_star(rng, {22, 19}, 3, 15);
    const double ab = exact_polygon_iou(a.polygon(), b).iou;
    const double ba = exact_polygon_iou(b.polygon(), a).iou;
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(ab, std::min(a.area(), b.area()) / std::max(a.area(), b.area()) + 1e-12);
    EXPECT_GE(ab, 0.0);
  }
}

TEST(ExactIou, OneOnlyForIdenticalRegions) {
  const Contour a = syn::axis_square(0, 0, 4);
  EXPECT_DOUBLE_EQ(exact_polygon_iou(a.polygon(), a).iou, 1.0);
  // Same area, different placement.
  EXPECT_LT(exact_polygon_iou(square_poly(0, 0, 4, 4), syn::axis_rect(0, 0, 8, 2)).iou, 1.0);
  // Same region with a different vertex start and extra collinear vertex.
  const Polygon shifted({{4, 0}, {4, 2}, {4, 4}, {0, 4}, {0, 0}});
  EXPECT_NEAR(exact_polygon_iou(shifted, a).iou, 1.0, 1e-15);
}

TEST(InteriorAnchor, StrictlyInsideEvenWhenCentroidIsNot) {
  const Contour u = syn::u_shape();
  EXPECT_TRUE(strictly_inside(u, interior_anchor(u)));
  // C-shape whose centroid falls into the opening.
  const Contour c({{0, 0}, {10, 0}, {10, 1}, {1, 1}, {1, 9}, {10, 9}, {10, 10}, {0, 10}});
  EXPECT_FALSE(strictly_inside(c, area_centroid(c.vertices())));
  EXPECT_TRUE(strictly_inside(c, interior_anchor(c)));
}
