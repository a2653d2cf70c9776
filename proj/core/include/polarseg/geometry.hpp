#pragma once

// Analytic 2-D geometry for polar instance representation: angle sets,
// polygon reconstruction from a pole plus radial distances, ray/contour
// intersection, point location and exact polygon overlap.
//
// All coordinates are image pixels. Rings are implicitly closed: the last
// vertex connects back to the first.

#include <cmath>
#include <span>
#include <vector>

namespace polarseg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Point2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }

  Box united(const Box& o) const;
  // Grows the box about its center so that each side is `factor` times longer.
  Box scaled(double factor) const;
};

Box bounding_box(std::span<const Point2> ring);

// Uniformly spaced ray directions theta_k = phase + 2*pi*k/K, k = 0..K-1.
// Directions that fall on a quarter turn are stored exactly, so axis-aligned
// shapes reconstruct without round-off.
class AngleSet {
 public:
  static constexpr int kDefaultRays = 32;

  explicit AngleSet(int rays = kDefaultRays, double phase = 0.0);

  int size() const { return static_cast<int>(theta_.size()); }
  double phase() const { return phase_; }
  double theta(int k) const { return theta_.at(static_cast<std::size_t>(k)); }
  Point2 direction(int k) const { return dirs_.at(static_cast<std::size_t>(k)); }
  std::span<const Point2> directions() const { return dirs_; }

 private:
  double phase_;
  std::vector<double> theta_;
  std::vector<Point2> dirs_;
};

// A pole plus one nonnegative radial distance per ray.
struct PolarParams {
  Point2 start;
  std::vector<double> distances;

  int rays() const { return static_cast<int>(distances.size()); }
};

// Closed vertex ring. Degenerate vertices are allowed (a reconstruction with
// zero distances collapses vertices onto the pole).
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  Polygon translated(Point2 offset) const;

 private:
  std::vector<Point2> vertices_;
};

// Validated simple ring. Construction drops consecutive duplicates (within
// 1e-9), keeps collinear vertices, rejects rings with fewer than three
// vertices, zero area or self-intersections, and stores the ring
// counter-clockwise.
class Contour {
 public:
  explicit Contour(std::vector<Point2> vertices);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const { return area_; }
  Box bounds() const { return bounds_; }
  Polygon polygon() const { return Polygon(vertices_); }

  Contour translated(Point2 offset) const;
  Contour scaled(double factor) const;

 private:
  std::vector<Point2> vertices_;
  double area_ = 0.0;
  Box bounds_;
};

enum class Location { kInside, kBoundary, kOutside };

inline constexpr double kBoundaryTolerance = 1e-9;

double signed_area(std::span<const Point2> ring);
Point2 area_centroid(std::span<const Point2> ring);
bool is_simple(std::span<const Point2> ring);
double distance_to_segment(Point2 p, Point2 a, Point2 b);
double distance_to_boundary(std::span<const Point2> ring, Point2 p);

// Nonzero-winding location with an absolute boundary band.
Location locate(std::span<const Point2> ring, Point2 p,
                double tolerance = kBoundaryTolerance);

// Boundary points count as inside.
bool point_in_contour(const Contour& contour, Point2 p);
bool strictly_inside(const Contour& contour, Point2 p);

// Vertex k = start + d_k * u_k, in ray order.
Polygon reconstruct_polygon(const PolarParams& params, const AngleSet& angles);

// Farthest hit of the ray start + t*dir (t >= 0) with the ring, or a negative
// value when the ray misses. Collinear overlaps contribute their far endpoint.
double farthest_ray_hit(std::span<const Point2> ring, Point2 start, Point2 dir);

// Radial distances from a strictly interior start to the farthest boundary
// crossing along each ray. Throws DomainError for outside/boundary starts.
std::vector<double> ray_contour_intersect(const Contour& contour, Point2 start,
                                          const AngleSet& angles);

double polygon_area(const Polygon& polygon);

// Area of the intersection of two closed rings, computed by integrating the
// boundary of the overlap. Rings must be simple; orientation is irrelevant.
double intersection_area(std::span<const Point2> a, std::span<const Point2> b);

struct IouResult {
  double iou = 0.0;
  bool degenerate = false;
};

IouResult exact_polygon_iou(const Polygon& a, const Polygon& b);
IouResult exact_polygon_iou(const Polygon& a, const Contour& b);

// A point safely inside the contour: the area centroid when it is strictly
// interior, otherwise the lattice point farthest from the boundary.
Point2 interior_anchor(const Contour& contour);

}  // namespace polarseg
