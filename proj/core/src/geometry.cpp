#include "polarseg/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

constexpr double kDedupTolerance = 1e-9;
constexpr double kRayDeterminantEps = 1e-12;

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

std::string describe(Point2 p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

std::vector<Point2> counter_clockwise(std::span<const Point2> ring) {
  std::vector<Point2> out(ring.begin(), ring.end());
  if (signed_area(out) < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

double extent(std::span<const Point2> a, std::span<const Point2> b) {
  const Box box = bounding_box(a).united(bounding_box(b));
  return std::max({1.0, box.width(), box.height()});
}

// Twice the integral of (x dy - y dx) over the parts of ring `a` that lie in
// the overlap with `b`. Edges shared with `b` count only when `owner` is set
// and both rings traverse the edge in the same direction.
double overlap_boundary_integral(std::span<const Point2> a, std::span<const Point2> b,
                                 bool owner, double tol) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  double acc = 0.0;
  std::vector<double> cuts;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = a[i];
    const Point2 d = a[(i + 1) % n] - p;
    const double len2 = dot(d, d);
    if (len2 == 0.0) continue;
    const double len = std::sqrt(len2);

    cuts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < m; ++j) {
      const Point2 u = b[j];
      const Point2 e = b[(j + 1) % m] - u;
      const double elen = norm(e);
      if (elen == 0.0) continue;
      const double den = cross(d, e);
      const Point2 pu = u - p;
      if (std::abs(den) > 1e-14 * len * elen) {
        const double w = cross(pu, e) / den;
        const double s = cross(pu, d) / den;
        constexpr double slack = 1e-12;
        if (w > -slack && w < 1.0 + slack && s > -slack && s < 1.0 + slack) {
          cuts.push_back(std::clamp(w, 0.0, 1.0));
        }
      } else if (std::abs(cross(pu, d)) <= tol * len) {
        for (const Point2 end : {u, u + e}) {
          const double w = dot(end - p, d) / len2;
          if (w > 0.0 && w < 1.0) cuts.push_back(w);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double w0 = cuts[k];
      const double w1 = cuts[k + 1];
      if ((w1 - w0) * len <= 1e-15 * len) continue;
      const Point2 p0 = p + d * w0;
      const Point2 p1 = p + d * w1;
      const Point2 mid = p + d * ((w0 + w1) / 2.0);
      const Location loc = locate(b, mid, tol);
      bool take = loc == Location::kInside;
      if (loc == Location::kBoundary && owner) {
        for (std::size_t j = 0; j < m; ++j) {
          const Point2 u = b[j];
          const Point2 v = b[(j + 1) % m];
          if (u == v) continue;
          if (distance_to_segment(mid, u, v) <= tol && dot(v - u, d) > 0.0) {
            take = true;
            break;
          }
        }
      }
      if (take) acc += cross(p0, p1);
    }
  }
  return acc;
}

}  // namespace

Box Box::united(const Box& o) const {
  return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

Box Box::scaled(double factor) const {
  const Point2 c = center();
  const double hw = width() * factor / 2.0;
  const double hh = height() * factor / 2.0;
  return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
}

Box bounding_box(std::span<const Point2> ring) {
  if (ring.empty()) return {};
  Box b{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
  for (const Point2& p : ring) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

AngleSet::AngleSet(int rays, double phase) : phase_(phase) {
  if (rays < 3) throw ParameterError("AngleSet needs at least 3 rays, got " + std::to_string(rays));
  if (!std::isfinite(phase)) throw ParameterError("AngleSet phase must be finite");
  theta_.resize(static_cast<std::size_t>(rays));
  dirs_.resize(static_cast<std::size_t>(rays));
  for (int k = 0; k < rays; ++k) {
    const double theta = phase + 2.0 * std::numbers::pi * k / rays;
    theta_[static_cast<std::size_t>(k)] = theta;
    Point2 u{std::cos(theta), std::sin(theta)};
    if (phase == 0.0 && (4 * k) % rays == 0) {
      static constexpr Point2 kQuarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      u = kQuarter[(4 * k) / rays];
    }
    dirs_[static_cast<std::size_t>(k)] = u;
  }
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw GeometryError("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
  }
  for (const Point2& p : vertices_) {
    if (!is_finite(p)) throw GeometryError("polygon vertex is not finite");
  }
}

Polygon Polygon::translated(Point2 offset) const {
  std::vector<Point2> v(vertices_);
  for (Point2& p : v) p = p + offset;
  return Polygon(std::move(v));
}

Contour::Contour(std::vector<Point2> vertices) {
  for (const Point2& p : vertices) {
    if (!is_finite(p)) throw GeometryError("contour vertex is not finite");
  }
  std::vector<Point2> ring;
  ring.reserve(vertices.size());
  for (const Point2& p : vertices) {
    if (ring.empty() || distance(ring.back(), p) > kDedupTolerance) ring.push_back(p);
  }
  while (ring.size() > 1 && distance(ring.front(), ring.back()) <= kDedupTolerance) ring.pop_back();
  if (ring.size() < 3) {
    throw GeometryError("contour needs at least 3 distinct vertices, got " + std::to_string(ring.size()));
  }
  const Box box = bounding_box(ring);
  const double scale = std::max(box.width(), box.height());
  const double area = signed_area(ring);
  if (!(std::abs(area) > 1e-12 * scale * scale)) throw GeometryError("contour has zero area");
  if (!is_simple(ring)) throw GeometryError("contour is self-intersecting");
  if (area < 0.0) std::reverse(ring.begin(), ring.end());
  vertices_ = std::move(ring);
  area_ = std::abs(area);
  bounds_ = box;
}

Contour Contour::translated(Point2 offset) const {
  std::vector<Point2> v(vertices_);
  for (Point2& p : v) p = p + offset;
  return Contour(std::move(v));
}

Contour Contour::scaled(double factor) const {
  std::vector<Point2> v(vertices_);
  for (Point2& p : v) p = p * factor;
  return Contour(std::move(v));
}

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shift to the first vertex to limit cancellation for far-from-origin rings.
  const Point2 o = ring[0];
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) acc += cross(ring[i] - o, ring[i + 1] - o);
  return acc / 2.0;
}

Point2 area_centroid(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  const Point2 o = ring.empty() ? Point2{} : ring[0];
  double a = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = ring[i] - o;
    const Point2 q = ring[(i + 1) % n] - o;
    const double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (a == 0.0) {
    Point2 mean{};
    for (const Point2& p : ring) mean = mean + p;
    return mean * (1.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  }
  return Point2{cx / (3.0 * a), cy / (3.0 * a)} + o;
}

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const Point2 c = ring[(i + 2) % n];
    // Consecutive edges folding back onto each other.
    if (orientation(a, b, c) == 0 && dot(b - a, c - b) < 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p1 = ring[i];
    const Point2 p2 = ring[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(p1, p2, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + d * t);
}

double distance_to_boundary(std::span<const Point2> ring, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, distance_to_segment(p, ring[i], ring[(i + 1) % n]));
  }
  return best;
}

Location locate(std::span<const Point2> ring, Point2 p, double tolerance) {
  const std::size_t n = ring.size();
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    if (distance_to_segment(p, a, b) <= tolerance) return Location::kBoundary;
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0.0) ++winding;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0.0) {
      --winding;
    }
  }
  return winding != 0 ? Location::kInside : Location::kOutside;
}

bool point_in_contour(const Contour& contour, Point2 p) {
  return locate(contour.vertices(), p) != Location::kOutside;
}

bool strictly_inside(const Contour& contour, Point2 p) {
  return locate(contour.vertices(), p) == Location::kInside;
}

Polygon reconstruct_polygon(const PolarParams& params, const AngleSet& angles) {
  if (params.rays() != angles.size()) {
    throw DimensionError("polar params carry " + std::to_string(params.rays()) +
                         " distances but the angle set has " + std::to_string(angles.size()) + " rays");
  }
  if (!is_finite(params.start)) throw ParameterError("polar start point is not finite");
  std::vector<Point2> vertices(params.distances.size());
  for (int k = 0; k < angles.size(); ++k) {
    const double d = params.distances[static_cast<std::size_t>(k)];
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ParameterError("radial distance " + std::to_string(k) + " must be finite and >= 0");
    }
    vertices[static_cast<std::size_t>(k)] = params.start + angles.direction(k) * d;
  }
  return Polygon(std::move(vertices));
}

double farthest_ray_hit(std::span<const Point2> ring, Point2 start, Point2 dir) {
  double best = -1.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 e = ring[(i + 1) % n] - a;
    const double elen = norm(e);
    if (elen == 0.0) continue;
    const Point2 sa = a - start;
    const double den = cross(dir, e);
    if (std::abs(den) > kRayDeterminantEps * elen) {
      const double t = cross(sa, e) / den;
      const double w = cross(sa, dir) / den;
      if (t >= 0.0 && w >= -kRayDeterminantEps && w <= 1.0 + kRayDeterminantEps) best = std::max(best, t);
    } else if (std::abs(cross(sa, dir)) <= kRayDeterminantEps * std::max(1.0, norm(sa))) {
      const double ta = dot(sa, dir);
      const double tb = dot(sa + e, dir);
      const double t = std::max(ta, tb);
      if (t >= 0.0) best = std::max(best, t);
    }
  }
  return best;
}

std::vector<double> ray_contour_intersect(const Contour& contour, Point2 start,
                                          const AngleSet& angles) {
  const Location loc = locate(contour.vertices(), start);
  if (loc != Location::kInside) {
    throw DomainError("ray start " + describe(start) +
                      (loc == Location::kBoundary ? " lies on the contour boundary"
                                                  : " lies outside the contour"));
  }
  std::vector<double> out(static_cast<std::size_t>(angles.size()));
  for (int k = 0; k < angles.size(); ++k) {
    const double t = farthest_ray_hit(contour.vertices(), start, angles.direction(k));
    if (!(t > 0.0)) throw DomainError("ray " + std::to_string(k) + " from " + describe(start) + " missed the contour");
    out[static_cast<std::size_t>(k)] = t;
  }
  return out;
}

double polygon_area(const Polygon& polygon) { return std::abs(signed_area(polygon.vertices())); }

double intersection_area(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  const std::vector<Point2> ca = counter_clockwise(a);
  const std::vector<Point2> cb = counter_clockwise(b);
  const double tol = 1e-11 * extent(ca, cb);
  const double twice = overlap_boundary_integral(ca, cb, true, tol) +
                       overlap_boundary_integral(cb, ca, false, tol);
  return std::max(0.0, twice / 2.0);
}

namespace {

IouResult iou_of_rings(std::span<const Point2> a, std::span<const Point2> b) {
  const double area_a = std::abs(signed_area(a));
  const double area_b = std::abs(signed_area(b));
  const double scale = extent(a, b);
  if (area_a <= 1e-14 * scale * scale || area_b <= 1e-14 * scale * scale) return {0.0, true};
  const double inter = std::min({intersection_area(a, b), area_a, area_b});
  const double uni = area_a + area_b - inter;
  return {std::clamp(inter / uni, 0.0, 1.0), false};
}

}  // namespace

IouResult exact_polygon_iou(const Polygon& a, const Polygon& b) {
  return iou_of_rings(a.vertices(), b.vertices());
}

IouResult exact_polygon_iou(const Polygon& a, const Contour& b) {
  return iou_of_rings(a.vertices(), b.vertices());
}

Point2 interior_anchor(const Contour& contour) {
  const Point2 c = area_centroid(contour.vertices());
  if (strictly_inside(contour, c)) return c;
  const Box box = contour.bounds();
  for (int n : {32, 128}) {
    double best = -1.0;
    Point2 best_point;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Point2 p{box.x0 + (i + 0.5) * box.width() / n, box.y0 + (j + 0.5) * box.height() / n};
        if (!strictly_inside(contour, p)) continue;
        const double d = distance_to_boundary(contour.vertices(), p);
        if (d > best) {
          best = d;
          best_point = p;
        }
      }
    }
    if (best > 0.0) return best_point;
  }
  throw DomainError("no interior point found for contour");
}

}  // namespace polarseg
