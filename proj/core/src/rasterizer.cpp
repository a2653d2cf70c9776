#include "polarseg/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

using Ring = std::vector<Point2>;

void check_raster_args(int width, int height, const Frame& frame) {
  if (width < 2 || height < 2) {
    throw ParameterError("mask resolution must be at least 2x2, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  if (!frame.invertible()) throw ParameterError("mask frame is not invertible");
}

std::vector<Ring> to_cell_space(std::span<const Ring> rings, const Frame& frame) {
  std::vector<Ring> out;
  out.reserve(rings.size());
  for (const Ring& ring : rings) {
    Ring r;
    r.reserve(ring.size());
    for (const Point2& p : ring) r.push_back(frame.to_cell(p));
    out.push_back(std::move(r));
  }
  return out;
}

void supersample(const std::vector<Ring>& rings, int samples, SoftMask& mask) {
  const int width = mask.width();
  const int height = mask.height();
  const long long columns = static_cast<long long>(width) * samples;
  std::vector<int> counts(static_cast<std::size_t>(width));
  std::vector<double> xs;

  double ymin = INFINITY;
  double ymax = -INFINITY;
  for (const Ring& r : rings) {
    for (const Point2& p : r) {
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const int row_lo = std::max(0, static_cast<int>(std::floor(ymin)));
  const int row_hi = std::min(height - 1, static_cast<int>(std::floor(ymax)));

  for (int row = row_lo; row <= row_hi; ++row) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int s = 0; s < samples; ++s) {
      const double y = row + (s + 0.5) / samples;
      xs.clear();
      for (const Ring& r : rings) {
        const std::size_t n = r.size();
        for (std::size_t i = 0; i < n; ++i) {
          const Point2 a = r[i];
          const Point2 b = r[(i + 1) % n];
          // Half-open rule so a vertex on the scanline is counted once.
          if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
            xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
          }
        }
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        // Sample q sits at x = (q + 0.5) / samples.
        long long q0 = static_cast<long long>(std::ceil(xs[k] * samples - 0.5));
        long long q1 = static_cast<long long>(std::ceil(xs[k + 1] * samples - 0.5));
        q0 = std::max(q0, 0LL);
        q1 = std::min(q1, columns);
        for (long long q = q0; q < q1; ++q) ++counts[static_cast<std::size_t>(q / samples)];
      }
    }
    const double norm = 1.0 / (static_cast<double>(samples) * samples);
    for (int col = 0; col < width; ++col) mask.at(col, row) = counts[static_cast<std::size_t>(col)] * norm;
  }
}

// Keeps the part of `in` with sign * coord(p) >= sign * bound.
void clip_half_plane(const Ring& in, Ring& out, bool vertical, double bound, double sign) {
  out.clear();
  const std::size_t n = in.size();
  if (n == 0) return;
  auto value = [&](Point2 p) { return sign * ((vertical ? p.x : p.y) - bound); };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = in[i];
    const Point2 b = in[(i + 1) % n];
    const double va = value(a);
    const double vb = value(b);
    if (va >= 0.0) out.push_back(a);
    if ((va >= 0.0) != (vb >= 0.0)) {
      const double t = va / (va - vb);
      Point2 p = a + (b - a) * t;
      if (vertical) {
        p.x = bound;
      } else {
        p.y = bound;
      }
      out.push_back(p);
    }
  }
}

double ring_signed_area(const Ring& r) {
  double acc = 0.0;
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) acc += cross(r[i], r[(i + 1) % n]);
  return acc / 2.0;
}

void exact_coverage(std::vector<Ring> rings, SoftMask& mask) {
  const int width = mask.width();
  const int height = mask.height();
  for (Ring& r : rings) {
    if (signed_area(r) < 0.0) std::reverse(r.begin(), r.end());
  }
  Ring tmp;
  Ring strip;
  Ring cell_a;
  Ring cell_b;
  for (const Ring& ring : rings) {
    const Box box = bounding_box(ring);
    const int row_lo = std::max(0, static_cast<int>(std::floor(box.y0)));
    const int row_hi = std::min(height - 1, static_cast<int>(std::floor(box.y1)));
    for (int row = row_lo; row <= row_hi; ++row) {
      clip_half_plane(ring, tmp, false, row, 1.0);
      clip_half_plane(tmp, strip, false, row + 1.0, -1.0);
      if (strip.size() < 3) continue;
      const Box sb = bounding_box(strip);
      const int col_lo = std::max(0, static_cast<int>(std::floor(sb.x0)));
      const int col_hi = std::min(width - 1, static_cast<int>(std::floor(sb.x1)));
      for (int col = col_lo; col <= col_hi; ++col) {
        clip_half_plane(strip, cell_a, true, col, 1.0);
        clip_half_plane(cell_a, cell_b, true, col + 1.0, -1.0);
        if (cell_b.size() < 3) continue;
        mask.at(col, row) += ring_signed_area(cell_b);
      }
    }
  }
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) mask.at(col, row) = std::clamp(mask.at(col, row), 0.0, 1.0);
  }
}

}  // namespace

Frame Frame::over_box(const Box& box, int cols, int rows) {
  if (cols < 1 || rows < 1) throw ParameterError("frame needs a positive cell count");
  return Frame{box.width() / cols, 0.0, 0.0, box.height() / rows, box.x0, box.y0};
}

bool Frame::invertible() const {
  const double det = determinant();
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  return std::isfinite(det) && scale > 0.0 && std::abs(det) > 1e-12 * scale * scale;
}

Point2 Frame::to_pixel(Point2 cell) const {
  return {a * cell.x + b * cell.y + tx, c * cell.x + d * cell.y + ty};
}

Point2 Frame::to_cell(Point2 pixel) const {
  const double det = determinant();
  const double px = pixel.x - tx;
  const double py = pixel.y - ty;
  return {(d * px - b * py) / det, (-c * px + a * py) / det};
}

SoftMask::SoftMask(int width, int height, Frame frame)
    : width_(width),
      height_(height),
      frame_(frame),
      values_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0.0) {
  check_raster_args(width, height, frame);
}

double SoftMask::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

SoftMask rasterize(const Polygon& polygon, int width, int height, const Frame& frame,
                   const RasterOptions& options) {
  const std::vector<Ring> rings{Ring(polygon.vertices().begin(), polygon.vertices().end())};
  return rasterize_rings(rings, width, height, frame, options);
}

SoftMask rasterize_rings(std::span<const std::vector<Point2>> rings, int width, int height,
                         const Frame& frame, const RasterOptions& options) {
  check_raster_args(width, height, frame);
  SoftMask mask(width, height, frame);
  std::vector<Ring> cell_rings = to_cell_space(rings, frame);
  if (options.coverage == Coverage::kExact) {
    exact_coverage(std::move(cell_rings), mask);
  } else {
    if (options.samples_per_axis < 1) throw ParameterError("samples_per_axis must be >= 1");
    supersample(cell_rings, options.samples_per_axis, mask);
  }
  return mask;
}

IouResult soft_iou(const SoftMask& a, const SoftMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("mask shapes differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  if (!(a.frame() == b.frame())) throw DimensionError("masks are defined over different frames");
  double inter = 0.0;
  double uni = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    inter += std::min(va[i], vb[i]);
    uni += std::max(va[i], vb[i]);
  }
  if (uni <= 0.0) return {1.0, true};
  return {std::clamp(inter / uni, 0.0, 1.0), false};
}

Box loss_frame_box(const Polygon& prediction, const Contour& contour) {
  Box box = bounding_box(prediction.vertices()).united(contour.bounds());
  // Keep the frame invertible for flat predictions on flat contours.
  const double side = std::max(box.width(), box.height());
  if (box.width() <= 1e-9 * side) box = {box.x0 - side / 2, box.y0, box.x1 + side / 2, box.y1};
  if (box.height() <= 1e-9 * side) box = {box.x0, box.y0 - side / 2, box.x1, box.y1 + side / 2};
  return box.scaled(1.05);
}

double representation_error(const Contour& contour, Point2 start, const AngleSet& angles) {
  PolarParams params{start, ray_contour_intersect(contour, start, angles)};
  const Polygon poly = reconstruct_polygon(params, angles);
  return 1.0 - exact_polygon_iou(poly, contour).iou;
}

void write_pgm(const SoftMask& mask, std::ostream& out) {
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  for (int row = 0; row < mask.height(); ++row) {
    for (int col = 0; col < mask.width(); ++col) {
      const double v = std::clamp(mask.at(col, row), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
}

}  // namespace polarseg
