#pragma once

// Position-aware supervision for polar polygon queries: ray-intersection
// targets from the current predicted pole, the L1 distance loss, the
// rasterized-IoU mask loss, the weighted objective, residual refinement of
// polar parameters across decoder layers, and a central-difference gradient
// harness used to validate the losses.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polarseg/geometry.hpp"
#include "polarseg/rasterizer.hpp"

namespace polarseg {

struct CostWeights {
  double lambda_class = 2.0;
  double lambda_dist = 5.0;
  double lambda_rmask = 2.0;
  double lambda_inner = 5.0;

  void validate() const;
  CostWeights scaled(double factor) const;
};

inline constexpr int kDefaultDecoderLayers = 6;

struct LayerPrediction {
  int layer = 1;  // 1-based decoder layer index
  PolarParams params;
  std::vector<double> class_scores;  // one score in [0,1] per category slot
};

// Sigmoid-focal form on the ground-truth category score.
struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

double focal_class_loss(double gt_score, const FocalParams& focal = {});

// Targets for a query whose pole is `predicted_start`. The pole is treated as
// a constant: callers re-run this whenever the pole moves.
std::vector<double> pats_targets(const Contour& contour, Point2 predicted_start, const AngleSet& angles);

double dist_loss(std::span<const double> target, std::span<const double> predicted);

struct MaskLossOptions {
  int resolution = SoftMask::kDefaultResolution;
  RasterOptions raster;
  // Pins the rasterization frame; defaults to loss_frame_box of the pair.
  std::optional<Box> frame_box;
};

struct MaskLoss {
  double value = 1.0;
  bool degenerate = false;         // prediction collapsed to its pole
  bool self_intersecting = false;  // reconstruction is not a simple ring
};

MaskLoss rmask_loss(const Contour& contour, const PolarParams& predicted, const AngleSet& angles,
                    const MaskLossOptions& options = {});

struct LossTerms {
  double cls = 0.0;
  double dist = 0.0;
  double rmask = 0.0;
};

struct LossBreakdown {
  LossTerms terms;
  double total = 0.0;
  bool degenerate = false;
  bool self_intersecting = false;
};

double weighted_objective(const LossTerms& terms, const CostWeights& weights);

struct LossOptions {
  MaskLossOptions mask;
  FocalParams focal;
};

// Weighted objective for an already matched (prediction, ground truth) pair.
// Targets are recomputed from the prediction's own pole.
LossBreakdown total_loss(const LayerPrediction& pred, const Contour& contour, int gt_category,
                         const CostWeights& weights, const AngleSet& angles, const LossOptions& options = {});

struct RefineResult {
  PolarParams params;
  int clamp_events = 0;
};

// start += delta_start; distances = max(0, distances + delta_distances).
RefineResult refine_params(const PolarParams& previous, Point2 delta_start,
                           std::span<const double> delta_distances);

enum class LossKind { kDist, kRmask };

struct GradientReport {
  // Layout: [d/dx, d/dy, d/dd_1 .. d/dd_K].
  std::vector<double> gradient;
  // Coordinates whose central difference straddles an L1 kink.
  std::vector<std::size_t> ambiguous;
  // Pole coordinates whose perturbation left the contour.
  std::vector<std::size_t> left_contour;
};

struct GradientOptions {
  double step = 1e-4;
  MaskLossOptions mask{SoftMask::kDefaultResolution, RasterOptions{Coverage::kExact, 4}, std::nullopt};
  // Test hook: adds this multiple of sum(d) to every loss evaluation.
  double fault = 0.0;
};

// Central differences of the chosen loss around `at`. Targets come from the
// unperturbed pole and stay fixed across each +/- pair; the mask frame is
// pinned the same way. Throws DomainError if `at.start` is not inside.
GradientReport fd_gradient(LossKind kind, const PolarParams& at, const Contour& contour,
                           const AngleSet& angles, const GradientOptions& options = {});

struct LossRow {
  std::string instance_id;
  int layer = 1;
  LossBreakdown loss;
};

void write_loss_csv(std::span<const LossRow> rows, std::ostream& out);

}  // namespace polarseg
