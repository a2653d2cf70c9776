#include "polarseg/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

// Shortest augmenting path with row/column potentials; requires rows <= cols.
// Returns, for every row, the column it is assigned to.
std::vector<std::size_t> solve_rows_le_cols(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

Matrix weighted_sum(const Matrix& cls, const Matrix& dist, const Matrix& rmask, const Matrix& inner,
                    const CostWeights& w) {
  Matrix total(cls.rows(), cls.cols());
  for (std::size_t r = 0; r < cls.rows(); ++r) {
    for (std::size_t c = 0; c < cls.cols(); ++c) {
      total(r, c) = w.lambda_class * cls(r, c) + w.lambda_dist * dist(r, c) + w.lambda_rmask * rmask(r, c) +
                    w.lambda_inner * inner(r, c);
    }
  }
  return total;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw DimensionError("matrix data does not match its shape");
}

CostMatrix CostMatrix::from_terms(Matrix cls, Matrix dist, Matrix rmask, Matrix inner, const CostWeights& weights) {
  weights.validate();
  for (const Matrix* m : {&dist, &rmask, &inner}) {
    if (m->rows() != cls.rows() || m->cols() != cls.cols()) throw DimensionError("cost term shapes differ");
  }
  CostMatrix out;
  out.total = weighted_sum(cls, dist, rmask, inner, weights);
  out.cls = std::move(cls);
  out.dist = std::move(dist);
  out.rmask = std::move(rmask);
  out.inner = std::move(inner);
  return out;
}

int inner_cost(const Contour& contour, Point2 start) { return point_in_contour(contour, start) ? 0 : 1; }

Point2 fallback_pole(const Contour& contour) { return interior_anchor(contour); }

CostMatrix build_cost_matrix(std::span<const LayerPrediction> preds, std::span<const GtInstance> gts,
                             const CostWeights& weights, const AngleSet& angles, const MatchOptions& options) {
  if (preds.empty()) throw ParameterError("cost matrix needs at least one prediction");
  weights.validate();
  const std::size_t n = preds.size();
  const std::size_t m = gts.size();
  Matrix cls(n, m), dist(n, m), rmask(n, m), inner(n, m);

  std::vector<std::vector<double>> fallback_targets(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Contour& c = gts[j].contour;
    fallback_targets[j] = ray_contour_intersect(c, fallback_pole(c), angles);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const LayerPrediction& p = preds[i];
    for (std::size_t j = 0; j < m; ++j) {
      const GtInstance& gt = gts[j];
      if (gt.category < 0 || static_cast<std::size_t>(gt.category) >= p.class_scores.size()) {
        throw ParameterError("gt category " + std::to_string(gt.category) + " has no predicted score");
      }
      cls(i, j) = focal_class_loss(p.class_scores[static_cast<std::size_t>(gt.category)], options.focal);
      inner(i, j) = inner_cost(gt.contour, p.params.start);
      if (strictly_inside(gt.contour, p.params.start)) {
        dist(i, j) = dist_loss(pats_targets(gt.contour, p.params.start, angles), p.params.distances);
      } else {
        dist(i, j) = dist_loss(fallback_targets[j], p.params.distances);
      }
      rmask(i, j) = rmask_loss(gt.contour, p.params, angles, options.mask).value;
    }
  }
  return CostMatrix::from_terms(std::move(cls), std::move(dist), std::move(rmask), std::move(inner), weights);
}

Assignment hungarian(const Matrix& costs) {
  Assignment out;
  if (costs.rows() == 0 || costs.cols() == 0) return out;
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    for (std::size_t c = 0; c < costs.cols(); ++c) {
      if (!std::isfinite(costs(r, c))) throw ParameterError("cost matrix entries must be finite");
    }
  }
  if (costs.rows() <= costs.cols()) {
    const auto row_to_col = solve_rows_le_cols(costs);
    for (std::size_t r = 0; r < row_to_col.size(); ++r) out.pairs.emplace_back(r, row_to_col[r]);
  } else {
    Matrix t(costs.cols(), costs.rows());
    for (std::size_t r = 0; r < costs.rows(); ++r) {
      for (std::size_t c = 0; c < costs.cols(); ++c) t(c, r) = costs(r, c);
    }
    const auto gt_to_pred = solve_rows_le_cols(t);
    for (std::size_t g = 0; g < gt_to_pred.size(); ++g) out.pairs.emplace_back(gt_to_pred[g], g);
    std::sort(out.pairs.begin(), out.pairs.end());
  }
  for (const auto& [r, c] : out.pairs) out.total_cost += costs(r, c);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> one_to_many_assign(const Matrix& costs, int per_gt, double tau) {
  if (per_gt < 1) throw ParameterError("one-to-many assignment needs per_gt >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::size_t> order(costs.rows());
  for (std::size_t c = 0; c < costs.cols(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs(a, c) < costs(b, c); });
    int taken = 0;
    for (std::size_t r : order) {
      if (taken == per_gt || costs(r, c) > tau) break;
      out.emplace_back(r, c);
      ++taken;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double default_one_to_many_tau(const Matrix& costs) {
  const Assignment a = hungarian(costs);
  if (a.pairs.empty()) return 0.0;
  std::vector<double> matched;
  for (const auto& [r, c] : a.pairs) matched.push_back(costs(r, c));
  std::sort(matched.begin(), matched.end());
  const std::size_t n = matched.size();
  const double median = n % 2 == 1 ? matched[n / 2] : (matched[n / 2 - 1] + matched[n / 2]) / 2.0;
  return 2.0 * median;
}

void write_assignment_csv(const std::string& image_id, const Assignment& assignment, const CostMatrix& costs,
                          std::ostream& out, bool header) {
  if (header) out << "image_id,pred_idx,gt_idx,cost_class,cost_dist,cost_rmask,cost_inner,total\n";
  const auto old = out.precision(10);
  for (const auto& [r, c] : assignment.pairs) {
    out << image_id << "," << r << "," << c << "," << costs.cls(r, c) << "," << costs.dist(r, c) << ","
        << costs.rmask(r, c) << "," << costs.inner(r, c) << "," << costs.total(r, c) << "\n";
  }
  out.precision(old);
}

}  // namespace polarseg
