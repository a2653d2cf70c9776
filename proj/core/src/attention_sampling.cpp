#include "polarseg/attention_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

void check_points(int points) {
  if (points < 1) throw ParameterError("need at least one sample point per ray, got " + std::to_string(points));
}

}  // namespace

void PolarAttentionConfig::validate(const AngleSet& angles) const {
  if (heads != angles.size()) {
    throw ParameterError("polar attention uses one head per ray: " + std::to_string(heads) + " heads for " +
                         std::to_string(angles.size()) + " rays");
  }
  check_points(points);
  if (!(projection_ratio > 0.0)) throw ParameterError("projection ratio must be > 0");
}

Grid2<int> uniform_levels(int heads, int points) {
  Grid2<int> levels(heads, points);
  for (int k = 0; k < heads; ++k) {
    for (int t = 0; t < points; ++t) {
      levels(k, t) = kFeatureStrides[static_cast<std::size_t>((k * points + t) % kFeatureStrides.size())];
    }
  }
  return levels;
}

SamplingGrid fan_base_grid(const PolarParams& params, const AngleSet& angles, int points) {
  check_points(points);
  if (params.rays() != angles.size()) throw DimensionError("polar params and angle set disagree on K");
  SamplingGrid grid{Grid2<Point2>(angles.size(), points), uniform_levels(angles.size(), points)};
  for (int k = 0; k < angles.size(); ++k) {
    const double d = params.distances[static_cast<std::size_t>(k)];
    if (!(d >= 0.0)) throw ParameterError("radial distances must be >= 0");
    const Point2 u = angles.direction(k);
    for (int t = 1; t <= points; ++t) {
      grid.locations(k, t - 1) = params.start + u * (d * t / points);
    }
  }
  return grid;
}

SamplingGrid polar_sampling_locations(const PolarParams& params, const AngleSet& angles, int points,
                                      const OffsetField& offsets) {
  if (offsets.rows() != angles.size() || offsets.cols() != points) {
    throw DimensionError("offset field is " + std::to_string(offsets.rows()) + "x" + std::to_string(offsets.cols()) +
                         ", expected " + std::to_string(angles.size()) + "x" + std::to_string(points));
  }
  SamplingGrid grid = fan_base_grid(params, angles, points);
  for (int k = 0; k < angles.size(); ++k) {
    const Point2 scale = angles.direction(k) * (params.distances[static_cast<std::size_t>(k)] / points);
    for (int t = 0; t < points; ++t) {
      const Point2 off = offsets(k, t);
      if (off.x != 0.0) grid.locations(k, t).x += off.x * scale.x;
      if (off.y != 0.0) grid.locations(k, t).y += off.y * scale.y;
    }
  }
  return grid;
}

SamplingGrid box_sampling_locations(Point2 center, double width, double height, const OffsetField& offsets) {
  if (!(width > 0.0) || !(height > 0.0)) throw ParameterError("box size must be positive");
  SamplingGrid grid{Grid2<Point2>(offsets.rows(), offsets.cols()), uniform_levels(offsets.rows(), offsets.cols())};
  for (int h = 0; h < offsets.rows(); ++h) {
    for (int p = 0; p < offsets.cols(); ++p) {
      const Point2 off = offsets(h, p);
      grid.locations(h, p) = {center.x + off.x * width, center.y + off.y * height};
    }
  }
  return grid;
}

Point2 pixel_to_level(Point2 pixel, int stride) {
  return {pixel.x / stride - 0.5, pixel.y / stride - 0.5};
}

FeatureMap::FeatureMap(int height, int width, int channels, int stride, std::vector<double> values)
    : height_(height), width_(width), channels_(channels), stride_(stride), values_(std::move(values)) {
  if (height < 1 || width < 1 || channels < 1) throw ParameterError("feature map dimensions must be positive");
  if (std::find(kFeatureStrides.begin(), kFeatureStrides.end(), stride) == kFeatureStrides.end()) {
    throw ParameterError("feature stride must be one of 8/16/32/64, got " + std::to_string(stride));
  }
  const std::size_t expected =
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  if (values_.size() != expected) throw DimensionError("feature map value count does not match its shape");
}

FeatureMap::FeatureMap(int height, int width, int channels, int stride)
    : FeatureMap(height, width, channels, stride,
                 std::vector<double>(static_cast<std::size_t>(std::max(height, 0)) *
                                         static_cast<std::size_t>(std::max(width, 0)) *
                                         static_cast<std::size_t>(std::max(channels, 0)),
                                     0.0)) {}

std::vector<double> bilinear_sample(const FeatureMap& map, Point2 at) {
  std::vector<double> out(static_cast<std::size_t>(map.channels()), 0.0);
  const Point2 cell = pixel_to_level(at, map.stride());
  if (!is_finite(cell)) return out;
  const double fx0 = std::floor(cell.x);
  const double fy0 = std::floor(cell.y);
  // Far outside: every neighbour is padding.
  if (fx0 < -2.0 || fy0 < -2.0 || fx0 > map.width() + 1.0 || fy0 > map.height() + 1.0) return out;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double ax = cell.x - fx0;
  const double ay = cell.y - fy0;
  const std::array<std::pair<std::array<int, 2>, double>, 4> taps{{
      {{x0, y0}, (1.0 - ax) * (1.0 - ay)},
      {{x0 + 1, y0}, ax * (1.0 - ay)},
      {{x0, y0 + 1}, (1.0 - ax) * ay},
      {{x0 + 1, y0 + 1}, ax * ay},
  }};
  for (const auto& [xy, w] : taps) {
    const int x = xy[0];
    const int y = xy[1];
    if (w == 0.0 || x < 0 || y < 0 || x >= map.width() || y >= map.height()) continue;
    for (int ch = 0; ch < map.channels(); ++ch) out[static_cast<std::size_t>(ch)] += w * map.at(y, x, ch);
  }
  return out;
}

double contour_diameter(const Contour& contour) {
  const auto v = contour.vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, distance(v[i], v[j]));
  }
  return best;
}

CoverageStats grid_coverage_stats(const SamplingGrid& grid, const Contour& contour, double band_fraction) {
  if (!(band_fraction >= 0.0)) throw ParameterError("boundary band fraction must be >= 0");
  CoverageStats stats;
  const auto points = grid.locations.flat();
  if (points.empty()) return stats;
  const double band = band_fraction * contour_diameter(contour);
  std::size_t near = 0;
  std::size_t inside = 0;
  for (const Point2& p : points) {
    if (distance_to_boundary(contour.vertices(), p) <= band) ++near;
    if (point_in_contour(contour, p)) ++inside;
  }
  const double n = static_cast<double>(points.size());
  stats.near_boundary = near / n;
  stats.interior = inside / n;
  stats.exterior = static_cast<double>(points.size() - inside) / n;
  return stats;
}

void write_grid_csv(const SamplingGrid& grid, std::ostream& out) {
  out << "ray,t,x,y,level\n";
  const auto old = out.precision(12);
  for (int k = 0; k < grid.heads(); ++k) {
    for (int t = 0; t < grid.points(); ++t) {
      const Point2 p = grid.locations(k, t);
      out << k << "," << (t + 1) << "," << p.x << "," << p.y << "," << grid.levels(k, t) << "\n";
    }
  }
  out.precision(old);
}

void write_grid_svg(const SamplingGrid& grid, const Contour& contour, std::ostream& out) {
  Box box = contour.bounds();
  for (const Point2& p : grid.locations.flat()) box = box.united({p.x, p.y, p.x, p.y});
  const double margin = 0.05 * std::max(box.width(), box.height()) + 1.0;
  const double radius = std::max(box.width(), box.height()) / 150.0 + 0.2;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << box.x0 - margin << " " << box.y0 - margin << " "
      << box.width() + 2 * margin << " " << box.height() + 2 * margin << "\">\n";
  out << "  <polygon fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"" << radius / 2 << "\" points=\"";
  for (const Point2& p : contour.vertices()) out << p.x << "," << p.y << " ";
  out << "\"/>\n";
  for (int k = 0; k < grid.heads(); ++k) {
    for (int t = 0; t < grid.points(); ++t) {
      const Point2 p = grid.locations(k, t);
      out << "  <circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"" << radius
          << "\" fill=\"#d62728\" data-ray=\"" << k << "\" data-t=\"" << t + 1 << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace polarseg
