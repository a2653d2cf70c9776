#pragma once

// Sampling geometry of deformable cross-attention, in two flavours:
//   - polar: points spread along each ray of the current polygon, one head
//     per ray, offsets scaled by that ray's distance;
//   - box: points scattered around a box center, offsets scaled by (w, h).
// Locations are in image pixels. Feature levels use cell centers at
// (i + 0.5) * stride.

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "polarseg/geometry.hpp"

namespace polarseg {

inline constexpr int kDefaultSamplePoints = 4;
inline constexpr std::array<int, 4> kFeatureStrides{8, 16, 32, 64};

// rows x cols grid of 2-D values (heads x points, or rays x points).
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int rows, int cols, T fill = {})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  const T& operator()(int r, int c) const { return data_[idx(r, c)]; }
  T& operator()(int r, int c) { return data_[idx(r, c)]; }
  std::span<const T> flat() const { return data_; }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// Unitless offsets supplied by the caller in place of learned ones.
using OffsetField = Grid2<Point2>;

struct SamplingGrid {
  Grid2<Point2> locations;  // rays/heads x points, image pixels
  Grid2<int> levels;        // stride of the feature level each point reads

  int heads() const { return locations.rows(); }
  int points() const { return locations.cols(); }
};

// Head count must equal the ray count; the projection ratio only affects
// learned weights and is carried as metadata.
struct PolarAttentionConfig {
  int heads = AngleSet::kDefaultRays;
  int points = kDefaultSamplePoints;
  double projection_ratio = 1.0;

  void validate(const AngleSet& angles) const;
};

// Point j of a query goes to level strides[j mod 4].
Grid2<int> uniform_levels(int heads, int points);

// g_{k,t} = s + d_k * (t/T) * u_k, t = 1..T.
SamplingGrid fan_base_grid(const PolarParams& params, const AngleSet& angles, int points);

// Fan grid plus offsets scaled elementwise by d_k * u_k / T.
SamplingGrid polar_sampling_locations(const PolarParams& params, const AngleSet& angles, int points,
                                      const OffsetField& offsets);

// g = center + offset * (w, h), one grid cell per (head, point) of `offsets`.
SamplingGrid box_sampling_locations(Point2 center, double width, double height, const OffsetField& offsets);

// Location expressed in cells of a level with the given stride.
Point2 pixel_to_level(Point2 pixel, int stride);

class FeatureMap {
 public:
  FeatureMap(int height, int width, int channels, int stride, std::vector<double> values);
  FeatureMap(int height, int width, int channels, int stride);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int stride() const { return stride_; }

  double at(int row, int col, int channel) const { return values_[offset(row, col, channel)]; }
  double& at(int row, int col, int channel) { return values_[offset(row, col, channel)]; }

 private:
  std::size_t offset(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }

  int height_;
  int width_;
  int channels_;
  int stride_;
  std::vector<double> values_;
};

// Bilinear interpolation at an image-pixel location, zero outside the map.
std::vector<double> bilinear_sample(const FeatureMap& map, Point2 at);

struct CoverageStats {
  double near_boundary = 0.0;
  double interior = 0.0;
  double exterior = 0.0;
};

// Fractions of grid points inside/outside the contour, and within
// band_fraction * diameter of its boundary.
CoverageStats grid_coverage_stats(const SamplingGrid& grid, const Contour& contour, double band_fraction = 0.05);

double contour_diameter(const Contour& contour);

// CSV columns: ray,t,x,y,level (t is 1-based).
void write_grid_csv(const SamplingGrid& grid, std::ostream& out);

// Sampling points drawn over the contour outline.
void write_grid_svg(const SamplingGrid& grid, const Contour& contour, std::ostream& out);

}  // namespace polarseg
