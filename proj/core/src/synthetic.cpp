#include "polarseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polarseg/errors.hpp"

namespace polarseg::synthetic {
namespace {

std::vector<double> sorted_angles(Rng& rng, int n) {
  // Jittered stratification keeps consecutive vertices apart.
  std::uniform_real_distribution<double> jitter(0.15, 0.85);
  std::uniform_real_distribution<double> rot(0.0, 2.0 * std::numbers::pi);
  const double offset = rot(rng);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = offset + 2.0 * std::numbers::pi * (i + jitter(rng)) / n;
  return a;
}

int vertex_count(Rng& rng, int lo, int hi) {
  if (lo < 3 || hi < lo) throw ParameterError("vertex count range must satisfy 3 <= lo <= hi");
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

Contour regular_polygon(Point2 center, double radius, int sides, double phase) {
  const AngleSet angles(sides, phase);
  std::vector<Point2> v;
  for (int k = 0; k < sides; ++k) v.push_back(center + angles.direction(k) * radius);
  return Contour(std::move(v));
}

Contour circle(Point2 center, double radius, int segments) { return regular_polygon(center, radius, segments, 0.0); }

Contour axis_square(double x0, double y0, double side) { return axis_rect(x0, y0, x0 + side, y0 + side); }

Contour axis_rect(double x0, double y0, double x1, double y1) {
  return Contour({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Contour u_shape() { return Contour({{0, 0}, {5, 0}, {5, 5}, {4, 5}, {4, 1}, {1, 1}, {1, 5}, {0, 5}}); }

Contour random_convex(Rng& rng, Point2 center, double min_radius, double max_radius, int min_vertices,
                      int max_vertices) {
  const int n = vertex_count(rng, min_vertices, max_vertices);
  std::uniform_real_distribution<double> radius(min_radius, max_radius);
  std::uniform_real_distribution<double> rot(0.0, std::numbers::pi);
  const double rx = radius(rng);
  const double ry = radius(rng);
  const double phi = rot(rng);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  std::vector<Point2> v;
  for (double a : sorted_angles(rng, n)) {
    const double ex = rx * std::cos(a);
    const double ey = ry * std::sin(a);
    v.push_back({center.x + c * ex - s * ey, center.y + s * ex + c * ey});
  }
  return Contour(std::move(v));
}

Contour random_star(Rng& rng, Point2 center, double min_radius, double max_radius, int min_vertices,
                    int max_vertices) {
  const int n = vertex_count(rng, min_vertices, max_vertices);
  std::uniform_real_distribution<double> radius(min_radius, max_radius);
  std::vector<Point2> v;
  for (double a : sorted_angles(rng, n)) {
    const double r = radius(rng);
    v.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return Contour(std::move(v));
}

Point2 random_interior_point(Rng& rng, const Contour& contour) {
  const Box b = contour.bounds();
  std::uniform_real_distribution<double> ux(b.x0, b.x1);
  std::uniform_real_distribution<double> uy(b.y0, b.y1);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point2 p{ux(rng), uy(rng)};
    if (strictly_inside(contour, p)) return p;
  }
  return interior_anchor(contour);
}

Scene random_scene(Rng& rng, int images, int size, int max_instances, int categories, int rays) {
  if (images < 1 || max_instances < 1 || categories < 1) throw ParameterError("scene parameters must be positive");
  Scene scene;
  for (int c = 1; c <= categories; ++c) scene.annotations.categories.push_back({c, "class" + std::to_string(c)});
  const AngleSet angles(rays);
  std::uniform_int_distribution<int> count(1, max_instances);
  std::uniform_int_distribution<int> cat(1, categories);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  InstanceId next_id = 1;
  // Instances sit in disjoint 2x2 slots of the image.
  const double slot = size / 2.0;
  for (int im = 0; im < images; ++im) {
    const ImageId image_id = im + 1;
    scene.annotations.images.push_back({image_id, size, size, "synthetic_" + std::to_string(image_id) + ".png"});
    const int n = std::min(count(rng), 4);
    for (int s = 0; s < n; ++s) {
      const Point2 center{slot * (s % 2) + slot / 2, slot * (s / 2) + slot / 2};
      const double rmax = slot * (0.25 + 0.2 * unit(rng));
      Contour shape = unit(rng) < 0.5 ? random_convex(rng, center, rmax * 0.5, rmax)
                                      : random_star(rng, center, rmax * 0.6, rmax);
      InstanceAnnotation a;
      a.id = next_id++;
      a.image_id = image_id;
      a.category_id = cat(rng);
      a.bbox = shape.bounds();
      a.rings.push_back(shape);

      // Most instances get a detection near their best achievable polygon.
      if (unit(rng) < 0.85) {
        const Point2 anchor = interior_anchor(shape);
        Point2 pole = anchor + Point2{noise(rng), noise(rng)} * (rmax * 0.05);
        if (!strictly_inside(shape, pole)) pole = anchor;
        std::vector<double> d = ray_contour_intersect(shape, pole, angles);
        const double quality = unit(rng);
        for (double& v : d) v = std::max(0.0, v * (1.0 + 0.25 * quality * noise(rng)));
        const int det_cat = unit(rng) < 0.9 ? a.category_id : cat(rng);
        scene.detections.push_back({image_id, det_cat, 0.3 + 0.7 * unit(rng), PolarParams{pole, std::move(d)}});
      }
      scene.annotations.annotations.push_back(std::move(a));
    }
    // A spurious low-confidence detection in a random place.
    if (unit(rng) < 0.5) {
      const Point2 pole{size * unit(rng), size * unit(rng)};
      std::vector<double> d(static_cast<std::size_t>(rays), slot * 0.2 * (0.5 + unit(rng)));
      scene.detections.push_back({image_id, cat(rng), 0.3 * unit(rng), PolarParams{pole, std::move(d)}});
    }
  }
  return scene;
}

}  // namespace polarseg::synthetic
