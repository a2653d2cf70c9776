#pragma once

// How well a contour can be represented by a K-ray polar polygon when the
// pole is free: the best IoU over interior poles, found by lattice search
// with one local refinement, plus the per-pole error landscape.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polarseg/geometry.hpp"

namespace polarseg {

inline constexpr int kDefaultSearchGrid = 64;

struct ApproxResult {
  double score = 0.0;
  Point2 optimal_start;
  Polygon optimal_polygon;
  int search_resolution = kDefaultSearchGrid;
  bool fragmented = false;  // scored on the largest of several rings
};

// IoU between the contour and its polar reconstruction from `start`.
double polar_fit_iou(const Contour& contour, Point2 start, const AngleSet& angles);

ApproxResult approximability_score(const Contour& contour, const AngleSet& angles, int grid_n = kDefaultSearchGrid);

// Fragmented instances are scored on their largest ring.
ApproxResult approximability_score(std::span<const Contour> rings, const AngleSet& angles,
                                   int grid_n = kDefaultSearchGrid);

using InstanceId = std::int64_t;

// Ids sorted by descending score (ties by ascending id), truncated to the top
// ceil(fraction * n). Throws ParameterError unless 0 < fraction <= 1.
std::vector<InstanceId> top_fraction_by_score(std::vector<std::pair<InstanceId, double>> scored, double fraction);

std::vector<InstanceId> rank_by_approximability(std::span<const std::pair<InstanceId, Contour>> instances,
                                                const AngleSet& angles, double top_fraction,
                                                int grid_n = kDefaultSearchGrid, int jobs = 1);

struct Landscape {
  int grid_n = 0;
  Box bounds;
  // Row-major grid_n x grid_n; empty where the lattice point is not interior.
  std::vector<std::optional<double>> errors;

  Point2 lattice_point(int col, int row) const;
  const std::optional<double>& at(int col, int row) const {
    return errors[static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_n) + static_cast<std::size_t>(col)];
  }
  std::optional<double> min() const;
  std::optional<double> max() const;
};

Landscape error_landscape(const Contour& contour, const AngleSet& angles, int grid_n = kDefaultSearchGrid,
                          int jobs = 1);

// grid_n rows of grid_n comma-separated errors; absent cells are empty.
void write_landscape_csv(const Landscape& landscape, std::ostream& out);
// Absent cells are 0; errors map linearly onto 1..255.
void write_landscape_pgm(const Landscape& landscape, std::ostream& out);

}  // namespace polarseg
