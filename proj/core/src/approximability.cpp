#include "polarseg/approximability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polarseg/errors.hpp"
#include "polarseg/parallel.hpp"

namespace polarseg {
namespace {

constexpr int kRefineFactor = 4;

void check_grid(int grid_n) {
  if (grid_n < 4) throw ParameterError("search lattice needs grid_n >= 4, got " + std::to_string(grid_n));
}

Point2 lattice(const Box& box, int grid_n, int col, int row) {
  return {box.x0 + (col + 0.5) * box.width() / grid_n, box.y0 + (row + 0.5) * box.height() / grid_n};
}

struct Candidate {
  double iou = -1.0;
  Point2 start;
};

void consider(const Contour& contour, const AngleSet& angles, Point2 p, Candidate& best) {
  if (!strictly_inside(contour, p)) return;
  const double iou = polar_fit_iou(contour, p, angles);
  if (iou > best.iou) best = {iou, p};
}

}  // namespace

double polar_fit_iou(const Contour& contour, Point2 start, const AngleSet& angles) {
  const PolarParams params{start, ray_contour_intersect(contour, start, angles)};
  return exact_polygon_iou(reconstruct_polygon(params, angles), contour).iou;
}

ApproxResult approximability_score(const Contour& contour, const AngleSet& angles, int grid_n) {
  check_grid(grid_n);
  const Box box = contour.bounds();
  Candidate best;
  for (int row = 0; row < grid_n; ++row) {
    for (int col = 0; col < grid_n; ++col) consider(contour, angles, lattice(box, grid_n, col, row), best);
  }
  if (best.iou < 0.0) {
    // Sliver: no lattice point landed inside.
    consider(contour, angles, interior_anchor(contour), best);
    if (best.iou < 0.0) throw DomainError("contour has no interior point to score from");
  } else {
    const double dx = box.width() / grid_n;
    const double dy = box.height() / grid_n;
    const Point2 center = best.start;
    for (int j = -kRefineFactor; j <= kRefineFactor; ++j) {
      for (int i = -kRefineFactor; i <= kRefineFactor; ++i) {
        if (i == 0 && j == 0) continue;
        consider(contour, angles, {center.x + i * dx / kRefineFactor, center.y + j * dy / kRefineFactor}, best);
      }
    }
  }
  PolarParams params{best.start, ray_contour_intersect(contour, best.start, angles)};
  return ApproxResult{best.iou, best.start, reconstruct_polygon(params, angles), grid_n, false};
}

ApproxResult approximability_score(std::span<const Contour> rings, const AngleSet& angles, int grid_n) {
  if (rings.empty()) throw ParameterError("instance has no rings");
  const auto largest =
      std::max_element(rings.begin(), rings.end(), [](const Contour& a, const Contour& b) { return a.area() < b.area(); });
  ApproxResult r = approximability_score(*largest, angles, grid_n);
  r.fragmented = rings.size() > 1;
  return r;
}

std::vector<InstanceId> top_fraction_by_score(std::vector<std::pair<InstanceId, double>> scored, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("top fraction must lie in (0, 1]");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(scored.size()) - 1e-9));
  std::vector<InstanceId> ids;
  for (std::size_t i = 0; i < std::min(keep, scored.size()); ++i) ids.push_back(scored[i].first);
  return ids;
}

std::vector<InstanceId> rank_by_approximability(std::span<const std::pair<InstanceId, Contour>> instances,
                                                const AngleSet& angles, double top_fraction, int grid_n, int jobs) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw ParameterError("top fraction must lie in (0, 1]");
  std::vector<std::pair<InstanceId, double>> scored(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    scored[i] = {instances[i].first, approximability_score(instances[i].second, angles, grid_n).score};
  });
  return top_fraction_by_score(std::move(scored), top_fraction);
}

Point2 Landscape::lattice_point(int col, int row) const { return lattice(bounds, grid_n, col, row); }

std::optional<double> Landscape::min() const {
  std::optional<double> out;
  for (const auto& e : errors) {
    if (e && (!out || *e < *out)) out = e;
  }
  return out;
}

std::optional<double> Landscape::max() const {
  std::optional<double> out;
  for (const auto& e : errors) {
    if (e && (!out || *e > *out)) out = e;
  }
  return out;
}

Landscape error_landscape(const Contour& contour, const AngleSet& angles, int grid_n, int jobs) {
  check_grid(grid_n);
  Landscape out;
  out.grid_n = grid_n;
  out.bounds = contour.bounds();
  out.errors.resize(static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n));
  parallel_for(out.errors.size(), jobs, [&](std::size_t idx) {
    const Point2 p = out.lattice_point(static_cast<int>(idx % static_cast<std::size_t>(grid_n)),
                                       static_cast<int>(idx / static_cast<std::size_t>(grid_n)));
    if (strictly_inside(contour, p)) out.errors[idx] = 1.0 - polar_fit_iou(contour, p, angles);
  });
  return out;
}

void write_landscape_csv(const Landscape& landscape, std::ostream& out) {
  const auto old = out.precision(10);
  for (int row = 0; row < landscape.grid_n; ++row) {
    for (int col = 0; col < landscape.grid_n; ++col) {
      if (col > 0) out << ",";
      if (const auto& e = landscape.at(col, row)) out << *e;
    }
    out << "\n";
  }
  out.precision(old);
}

void write_landscape_pgm(const Landscape& landscape, std::ostream& out) {
  out << "P5\n" << landscape.grid_n << " " << landscape.grid_n << "\n255\n";
  for (const auto& e : landscape.errors) {
    const int v = e ? 1 + static_cast<int>(std::lround(254.0 * std::clamp(*e, 0.0, 1.0))) : 0;
    out.put(static_cast<char>(static_cast<unsigned char>(v)));
  }
}

}  // namespace polarseg
