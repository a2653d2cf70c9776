#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "polarseg/attention_sampling.hpp"
#include "polarseg/errors.hpp"
#include "polarseg/synthetic.hpp"

using namespace polarseg;
namespace syn = polarseg::synthetic;

namespace {

// K=4 puts ray 1 on u = (0, 1).
PolarParams upward(double d) { return {{10, 10}, {1, d, 1, 1}}; }

OffsetField random_offsets(syn::Rng& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  OffsetField f(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) f(r, c) = {u(rng), u(rng)};
  }
  return f;
}

}  // namespace

TEST(FanGrid, PointsAlongRay) {
  const SamplingGrid g = fan_base_grid(upward(8), AngleSet(4), 4);
  ASSERT_EQ(g.heads(), 4);
  ASSERT_EQ(g.points(), 4);
  EXPECT_EQ(g.locations(1, 0), (Point2{10, 12}));
  EXPECT_EQ(g.locations(1, 1), (Point2{10, 14}));
  EXPECT_EQ(g.locations(1, 2), (Point2{10, 16}));
  EXPECT_EQ(g.locations(1, 3), (Point2{10, 18}));
}

TEST(FanGrid, ZeroDistanceCollapsesToPole) {
  const SamplingGrid g = fan_base_grid(upward(0), AngleSet(4), 4);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(g.locations(1, t), (Point2{10, 10}));
}

TEST(FanGrid, SinglePointIsPolygonVertex) {
  const AngleSet angles(4);
  const PolarParams p{{0, 0}, {4, 4, 4, 4}};
  const SamplingGrid g = fan_base_grid(p, angles, 1);
  const Polygon poly = reconstruct_polygon(p, angles);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(g.locations(k, 0), poly[static_cast<std::size_t>(k)]);
}

TEST(FanGrid, LastPointIsVertexForAnyShape) {
  syn::Rng rng(1);
  const AngleSet angles(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Contour c = syn::random_star(rng, {40, 40}, 5, 30);
    const PolarParams p{syn::random_interior_point(rng, c), {}};
    const PolarParams q{p.start, ray_contour_intersect(c, p.start, angles)};
    const SamplingGrid g = polar_sampling_locations(q, angles, 4, OffsetField(32, 4));
    const Polygon poly = reconstruct_polygon(q, angles);
    for (int k = 0; k < 32; ++k) {
      EXPECT_NEAR(g.locations(k, 3).x, poly[static_cast<std::size_t>(k)].x, 1e-12);
      EXPECT_NEAR(g.locations(k, 3).y, poly[static_cast<std::size_t>(k)].y, 1e-12);
    }
  }
}

TEST(FanGrid, Validation) {
  EXPECT_THROW(fan_base_grid(upward(1), AngleSet(4), 0), ParameterError);
  EXPECT_THROW(fan_base_grid(upward(1), AngleSet(5), 4), DimensionError);
  EXPECT_THROW(fan_base_grid(upward(-1), AngleSet(4), 4), ParameterError);
}

TEST(PolarOffsets, ZeroOffsetsAreBitwiseFanGrid) {
  syn::Rng rng(2);
  std::uniform_real_distribution<double> u(0.1, 50);
  const AngleSet angles(32);
  for (int trial = 0; trial < 20; ++trial) {
    PolarParams p{{u(rng), u(rng)}, {}};
    for (int k = 0; k < 32; ++k) p.distances.push_back(u(rng));
    const SamplingGrid a = fan_base_grid(p, angles, 4);
    const SamplingGrid b = polar_sampling_locations(p, angles, 4, OffsetField(32, 4));
    EXPECT_TRUE(a.locations == b.locations);
    EXPECT_TRUE(a.levels == b.levels);
  }
}

TEST(PolarOffsets, ScaledByRayDistance) {
  OffsetField off(4, 4);
  off(1, 2) = {0.5, -0.5};
  const SamplingGrid base = fan_base_grid(upward(8), AngleSet(4), 4);
  const SamplingGrid g = polar_sampling_locations(upward(8), AngleSet(4), 4, off);
  EXPECT_EQ(g.locations(1, 2), (base.locations(1, 2) + Point2{0, -1}));
  EXPECT_EQ(g.locations(1, 2), (Point2{10, 15}));
  EXPECT_EQ(g.locations(1, 1), base.locations(1, 1));
}

TEST(PolarOffsets, ShapeMismatchThrows) {
  EXPECT_THROW(polar_sampling_locations(upward(8), AngleSet(4), 4, OffsetField(4, 3)), DimensionError);
  EXPECT_THROW(polar_sampling_locations(upward(8), AngleSet(4), 4, OffsetField(3, 4)), DimensionError);
}

TEST(PolarOffsets, DoublingDistancesDoublesDisplacements) {
  syn::Rng rng(3);
  std::uniform_real_distribution<double> u(0.5, 20);
  const AngleSet angles(16);
  for (int trial = 0; trial < 20; ++trial) {
    PolarParams p{{u(rng), u(rng)}, {}};
    for (int k = 0; k < 16; ++k) p.distances.push_back(u(rng));
    PolarParams q = p;
    for (double& d : q.distances) d *= 2;
    const OffsetField off = random_offsets(rng, 16, 4);
    const SamplingGrid a = polar_sampling_locations(p, angles, 4, off);
    const SamplingGrid b = polar_sampling_locations(q, angles, 4, off);
    for (int k = 0; k < 16; ++k) {
      for (int t = 0; t < 4; ++t) {
        const Point2 da = a.locations(k, t) - p.start;
        const Point2 db = b.locations(k, t) - p.start;
        EXPECT_NEAR(db.x, 2 * da.x, 1e-9);
        EXPECT_NEAR(db.y, 2 * da.y, 1e-9);
      }
    }
  }
}

TEST(PolarOffsets, TranslationEquivariant) {
  syn::Rng rng(4);
  const AngleSet angles(8);
  const PolarParams p{{3, 4}, {1, 2, 3, 4, 5, 6, 7, 8}};
  const OffsetField off = random_offsets(rng, 8, 4);
  const Point2 t{12.5, -7.25};
  const SamplingGrid a = polar_sampling_locations(p, angles, 4, off);
  const SamplingGrid b = polar_sampling_locations({p.start + t, p.distances}, angles, 4, off);
  for (int k = 0; k < 8; ++k) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(b.locations(k, j).x, a.locations(k, j).x + t.x, 1e-12);
      EXPECT_NEAR(b.locations(k, j).y, a.locations(k, j).y + t.y, 1e-12);
    }
  }
}

TEST(BoxSampling, Examples) {
  OffsetField off(1, 3);
  off(0, 0) = {0.25, 0.5};
  off(0, 2) = {0.5, 0.5};
  const SamplingGrid g = box_sampling_locations({10, 10}, 4, 8, off);
  EXPECT_EQ(g.locations(0, 0), (Point2{11, 14}));
  EXPECT_EQ(g.locations(0, 1), (Point2{10, 10}));
  EXPECT_EQ(g.locations(0, 2), (Point2{12, 14}));
  EXPECT_THROW(box_sampling_locations({0, 0}, 0, 1, off), ParameterError);
}

TEST(BoxSampling, TranslationEquivariant) {
  syn::Rng rng(5);
  const OffsetField off = random_offsets(rng, 8, 16);
  const SamplingGrid a = box_sampling_locations({5, 6}, 10, 20, off);
  const SamplingGrid b = box_sampling_locations({5 - 3, 6 + 9}, 10, 20, off);
  for (int h = 0; h < 8; ++h) {
    for (int p = 0; p < 16; ++p) {
      EXPECT_NEAR(b.locations(h, p).x, a.locations(h, p).x - 3, 1e-12);
      EXPECT_NEAR(b.locations(h, p).y, a.locations(h, p).y + 9, 1e-12);
    }
  }
}

TEST(HeadConfig, OneHeadPerRay) {
  const AngleSet angles(32);
  PolarAttentionConfig cfg;
  EXPECT_EQ(cfg.heads, 32);
  EXPECT_EQ(cfg.points, 4);
  EXPECT_EQ(cfg.projection_ratio, 1.0);
  EXPECT_NO_THROW(cfg.validate(angles));
  cfg.heads = 8;
  EXPECT_THROW(cfg.validate(angles), ParameterError);
}

TEST(Levels, UniformAcrossFourStrides) {
  const Grid2<int> levels = uniform_levels(32, 4);
  std::map<int, int> counts;
  for (int v : levels.flat()) ++counts[v];
  EXPECT_EQ(counts, (std::map<int, int>{{8, 32}, {16, 32}, {32, 32}, {64, 32}}));
  EXPECT_EQ(levels(0, 0), 8);
  EXPECT_EQ(levels(0, 3), 64);
  EXPECT_EQ(levels(1, 0), 8);
}

TEST(Levels, PixelToCellUsesCellCenters) {
  EXPECT_EQ(pixel_to_level({4, 12}, 8), (Point2{0, 1}));
  EXPECT_EQ(pixel_to_level({0, 0}, 16), (Point2{-0.5, -0.5}));
}

TEST(Bilinear, CenterOfFourCells) {
  const FeatureMap map(2, 2, 1, 8, {0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {8, 8})[0], 1.5);
}

TEST(Bilinear, CellCentersAndPadding) {
  const FeatureMap map(2, 2, 1, 8, {0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {4, 4})[0], 0.0);
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {12, 4})[0], 1.0);
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {4, 12})[0], 2.0);
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {12, 12})[0], 3.0);
  EXPECT_EQ(bilinear_sample(map, {1000, -500})[0], 0.0);
  // Half a cell past the last center blends with zero padding.
  EXPECT_DOUBLE_EQ(bilinear_sample(map, {16, 12})[0], 1.5);
}

TEST(Bilinear, ExactOnAffineFunctions) {
  const int h = 6;
  const int w = 9;
  const int stride = 16;
  FeatureMap map(h, w, 2, stride);
  auto f = [&](double x, double y, int ch) { return ch == 0 ? 0.5 * x - 2.0 * y + 3.0 : -x + 0.25 * y; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int ch = 0; ch < 2; ++ch) map.at(r, c, ch) = f((c + 0.5) * stride, (r + 0.5) * stride, ch);
    }
  }
  syn::Rng rng(6);
  std::uniform_real_distribution<double> ux(0.5 * stride, (w - 0.5) * stride);
  std::uniform_real_distribution<double> uy(0.5 * stride, (h - 0.5) * stride);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{ux(rng), uy(rng)};
    const auto v = bilinear_sample(map, p);
    EXPECT_NEAR(v[0], f(p.x, p.y, 0), 1e-9);
    EXPECT_NEAR(v[1], f(p.x, p.y, 1), 1e-9);
  }
}

TEST(Bilinear, FeatureMapValidation) {
  EXPECT_THROW(FeatureMap(2, 2, 1, 4), ParameterError);
  EXPECT_THROW(FeatureMap(2, 2, 1, 8, {1, 2, 3}), DimensionError);
  EXPECT_NO_THROW(FeatureMap(2, 2, 1, 64));
}

TEST(Coverage, OwnVerticesAreAllNearBoundary) {
  const AngleSet angles(32);
  syn::Rng rng(7);
  const Contour c = syn::random_convex(rng, {50, 50}, 10, 30);
  const Point2 s = interior_anchor(c);
  const SamplingGrid g = fan_base_grid({s, ray_contour_intersect(c, s, angles)}, angles, 1);
  const CoverageStats st = grid_coverage_stats(g, c);
  EXPECT_EQ(st.near_boundary, 1.0);
}

TEST(Coverage, CentroidGridIsInteriorAwayFromBoundary) {
  const Contour c = syn::axis_square(0, 0, 100);
  const SamplingGrid g = box_sampling_locations({50, 50}, 10, 10, OffsetField(8, 4));
  const CoverageStats st = grid_coverage_stats(g, c);
  EXPECT_EQ(st.near_boundary, 0.0);
  EXPECT_EQ(st.interior, 1.0);
  EXPECT_EQ(st.exterior, 0.0);
}

TEST(Coverage, FractionsPartition) {
  syn::Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Contour c = syn::random_star(rng, {50, 50}, 10, 30);
    const SamplingGrid g = box_sampling_locations(c.bounds().center(), 40, 40, random_offsets(rng, 8, 16));
    const CoverageStats st = grid_coverage_stats(g, c);
    for (double v : {st.near_boundary, st.interior, st.exterior}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_DOUBLE_EQ(st.interior + st.exterior, 1.0);
  }
}

TEST(Coverage, PolarGridHugsBoundaryMoreThanBoxGrid) {
  syn::Rng rng(9);
  const AngleSet angles(32);
  double polar_sum = 0.0;
  double box_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Contour c = syn::random_convex(rng, {50, 50}, 10, 40);
    const Point2 s = interior_anchor(c);
    const SamplingGrid polar = polar_sampling_locations({s, ray_contour_intersect(c, s, angles)}, angles, 4,
                                                        OffsetField(32, 4));
    const Box b = c.bounds();
    const SamplingGrid box = box_sampling_locations(b.center(), b.width(), b.height(), OffsetField(8, 16));
    polar_sum += grid_coverage_stats(polar, c).near_boundary;
    box_sum += grid_coverage_stats(box, c).near_boundary;
  }
  EXPECT_GT(polar_sum / 100, box_sum / 100);
}

TEST(Export, CsvRows) {
  const SamplingGrid g = fan_base_grid(upward(8), AngleSet(4), 2);
  std::ostringstream out;
  write_grid_csv(g, out);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("ray,t,x,y,level\n0,1,10.5,10,8\n0,2,11,10,16\n1,1,10,14,32\n", 0), 0u);
}

TEST(Export, SvgHasOneCirclePerPoint) {
  const Contour c = syn::axis_square(0, 0, 20);
  const SamplingGrid g = fan_base_grid({{10, 10}, {10, 10, 10, 10}}, AngleSet(4), 3);
  std::ostringstream out;
  write_grid_svg(g, c, out);
  const std::string s = out.str();
  std::size_t circles = 0;
  for (std::size_t pos = s.find("<circle"); pos != std::string::npos; pos = s.find("<circle", pos + 1)) ++circles;
  EXPECT_EQ(circles, 12u);
  EXPECT_NE(s.find("<polygon"), std::string::npos);
}
