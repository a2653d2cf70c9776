#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polarseg/geometry.hpp"
#include "polarseg/supervision.hpp"

namespace polarseg {

// Dense row-major matrix: rows are predictions, columns ground truths.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct CostMatrix {
  Matrix total;
  // Unweighted per-term costs, kept for diagnostics.
  Matrix cls;
  Matrix dist;
  Matrix rmask;
  Matrix inner;

  std::size_t rows() const { return total.rows(); }
  std::size_t cols() const { return total.cols(); }

  // Combines per-term matrices with the given weights.
  static CostMatrix from_terms(Matrix cls, Matrix dist, Matrix rmask, Matrix inner, const CostWeights& weights);
};

struct GtInstance {
  Contour contour;
  int category = 0;  // index into LayerPrediction::class_scores
};

struct Assignment {
  // (prediction index, gt index), sorted by prediction index.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

// 0 when the pole lies inside or on the contour, 1 otherwise.
int inner_cost(const Contour& contour, Point2 start);

// Pole used to build distance targets for predictions whose pole is outside.
Point2 fallback_pole(const Contour& contour);

struct MatchOptions {
  MaskLossOptions mask;
  FocalParams focal;
};

CostMatrix build_cost_matrix(std::span<const LayerPrediction> preds, std::span<const GtInstance> gts,
                             const CostWeights& weights, const AngleSet& angles, const MatchOptions& options = {});

// Minimum-cost one-to-one assignment; |pairs| = min(rows, cols).
Assignment hungarian(const Matrix& costs);
inline Assignment hungarian(const CostMatrix& m) { return hungarian(m.total); }

// Per ground-truth column, up to `per_gt` lowest-cost predictions whose cost
// is <= tau. A prediction may appear under several columns.
std::vector<std::pair<std::size_t, std::size_t>> one_to_many_assign(const Matrix& costs, int per_gt, double tau);
inline std::vector<std::pair<std::size_t, std::size_t>> one_to_many_assign(const CostMatrix& m, int per_gt,
                                                                           double tau) {
  return one_to_many_assign(m.total, per_gt, tau);
}

inline constexpr int kDefaultOneToManyPerGt = 4;

// Twice the median matched cost of the one-to-one assignment.
double default_one_to_many_tau(const Matrix& costs);

void write_assignment_csv(const std::string& image_id, const Assignment& assignment, const CostMatrix& costs,
                          std::ostream& out, bool header = true);

}  // namespace polarseg
