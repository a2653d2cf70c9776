#pragma once

// Seeded generators for synthetic shapes and scenes used by the property
// suites, the gradient check command and the benchmarks.

#include <cstdint>
#include <random>
#include <vector>

#include "polarseg/dataset_eval.hpp"
#include "polarseg/geometry.hpp"

namespace polarseg::synthetic {

using Rng = std::mt19937_64;

Contour regular_polygon(Point2 center, double radius, int sides, double phase = 0.0);
Contour circle(Point2 center, double radius, int segments = 360);
Contour axis_square(double x0, double y0, double side);
Contour axis_rect(double x0, double y0, double x1, double y1);

// The notched "U" used throughout the tests:
// (0,0),(5,0),(5,5),(4,5),(4,1),(1,1),(1,5),(0,5).
Contour u_shape();

// Points on a rotated ellipse at sorted random angles: always convex.
Contour random_convex(Rng& rng, Point2 center, double min_radius, double max_radius, int min_vertices = 5,
                      int max_vertices = 14);

// Random radii at sorted random angles around `center`: simple and star-shaped
// with respect to `center`, generally non-convex.
Contour random_star(Rng& rng, Point2 center, double min_radius, double max_radius, int min_vertices = 5,
                    int max_vertices = 14);

// A strictly interior point drawn uniformly from the contour's bounding box.
Point2 random_interior_point(Rng& rng, const Contour& contour);

struct Scene {
  AnnotationSet annotations;
  std::vector<PolygonDetection> detections;
};

// `images` images of size x size pixels with a few convex/star instances per
// image, plus polar detections that perturb each instance's best pole and
// distances, and some spurious low-score detections.
Scene random_scene(Rng& rng, int images, int size = 256, int max_instances = 4, int categories = 2, int rays = 32);

}  // namespace polarseg::synthetic
