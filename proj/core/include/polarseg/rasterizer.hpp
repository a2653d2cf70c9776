#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "polarseg/geometry.hpp"

namespace polarseg {

// Affine map from mask-cell space to image pixels:
//   pixel = [a b; c d] * cell + (tx, ty)
// Cell (i, j) covers [i, i+1) x [j, j+1) in cell space.
struct Frame {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  // Axis-aligned frame stretching `cols` x `rows` cells over `box`.
  static Frame over_box(const Box& box, int cols, int rows);

  double determinant() const { return a * d - b * c; }
  bool invertible() const;
  Point2 to_pixel(Point2 cell) const;
  Point2 to_cell(Point2 pixel) const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class Coverage {
  kSupersample,  // S x S point samples per cell, even-odd fill
  kExact,        // exact area of the polygon inside each cell
};

struct RasterOptions {
  Coverage coverage = Coverage::kSupersample;
  int samples_per_axis = 4;
};

class SoftMask {
 public:
  static constexpr int kDefaultResolution = 32;

  SoftMask(int width, int height, Frame frame);

  int width() const { return width_; }
  int height() const { return height_; }
  const Frame& frame() const { return frame_; }

  double at(int col, int row) const { return values_[index(col, row)]; }
  double& at(int col, int row) { return values_[index(col, row)]; }
  std::span<const double> values() const { return values_; }

  double sum() const;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  Frame frame_;
  std::vector<double> values_;
};

// Per-cell coverage fraction of the polygon. Throws ParameterError for a
// singular frame or a resolution below 2.
SoftMask rasterize(const Polygon& polygon, int width, int height, const Frame& frame,
                   const RasterOptions& options = {});

// Several rings filled together (even-odd in supersample mode, summed
// coverage in exact mode). Used for fragmented instances.
SoftMask rasterize_rings(std::span<const std::vector<Point2>> rings, int width, int height,
                         const Frame& frame, const RasterOptions& options = {});

// sum(min) / sum(max). Two all-zero masks compare as identical (iou 1) and
// are flagged degenerate. Throws DimensionError on shape or frame mismatch.
IouResult soft_iou(const SoftMask& a, const SoftMask& b);

// Union bounding box of both shapes, grown by 5%.
Box loss_frame_box(const Polygon& prediction, const Contour& contour);

// 1 - IoU between the contour and its polar reconstruction from `start`,
// using exact clipping.
double representation_error(const Contour& contour, Point2 start, const AngleSet& angles);

// Binary PGM (P5), 8-bit, row 0 first.
void write_pgm(const SoftMask& mask, std::ostream& out);

}  // namespace polarseg
