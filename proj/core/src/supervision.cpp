#include "polarseg/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

constexpr double kDegenerateDistance = 1e-9;

double fault_term(const PolarParams& p, double fault) {
  if (fault == 0.0) return 0.0;
  double s = 0.0;
  for (double d : p.distances) s += d;
  return fault * s;
}

}  // namespace

void CostWeights::validate() const {
  for (double w : {lambda_class, lambda_dist, lambda_rmask, lambda_inner}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("cost weights must be finite and >= 0");
  }
}

CostWeights CostWeights::scaled(double factor) const {
  return {lambda_class * factor, lambda_dist * factor, lambda_rmask * factor, lambda_inner * factor};
}

double focal_class_loss(double gt_score, const FocalParams& focal) {
  if (!(gt_score >= 0.0 && gt_score <= 1.0)) throw ParameterError("class score must lie in [0,1]");
  if (gt_score >= 1.0) return 0.0;
  const double p = std::max(gt_score, 1e-12);
  return -focal.alpha * std::pow(1.0 - p, focal.gamma) * std::log(p);
}

std::vector<double> pats_targets(const Contour& contour, Point2 predicted_start, const AngleSet& angles) {
  return ray_contour_intersect(contour, predicted_start, angles);
}

double dist_loss(std::span<const double> target, std::span<const double> predicted) {
  if (target.size() != predicted.size()) {
    throw DimensionError("dist_loss length mismatch: " + std::to_string(target.size()) + " targets vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  if (target.empty()) throw DimensionError("dist_loss needs at least one ray");
  double acc = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) acc += std::abs(target[k] - predicted[k]);
  return acc / static_cast<double>(target.size());
}

MaskLoss rmask_loss(const Contour& contour, const PolarParams& predicted, const AngleSet& angles,
                    const MaskLossOptions& options) {
  const Polygon poly = reconstruct_polygon(predicted, angles);
  MaskLoss out;
  const double longest = *std::max_element(predicted.distances.begin(), predicted.distances.end());
  if (longest <= kDegenerateDistance) {
    out.value = 1.0;
    out.degenerate = true;
    return out;
  }
  out.self_intersecting = !is_simple(poly.vertices());
  const Box box = options.frame_box.value_or(loss_frame_box(poly, contour));
  const Frame frame = Frame::over_box(box, options.resolution, options.resolution);
  const SoftMask pred_mask = rasterize(poly, options.resolution, options.resolution, frame, options.raster);
  const SoftMask gt_mask = rasterize(contour.polygon(), options.resolution, options.resolution, frame, options.raster);
  const IouResult iou = soft_iou(pred_mask, gt_mask);
  out.value = 1.0 - iou.iou;
  if (pred_mask.sum() <= 0.0) {
    out.value = 1.0;
    out.degenerate = true;
  }
  return out;
}

double weighted_objective(const LossTerms& terms, const CostWeights& weights) {
  return weights.lambda_class * terms.cls + weights.lambda_dist * terms.dist + weights.lambda_rmask * terms.rmask;
}

LossBreakdown total_loss(const LayerPrediction& pred, const Contour& contour, int gt_category,
                         const CostWeights& weights, const AngleSet& angles, const LossOptions& options) {
  weights.validate();
  if (gt_category < 0 || static_cast<std::size_t>(gt_category) >= pred.class_scores.size()) {
    throw ParameterError("category index " + std::to_string(gt_category) + " outside the " +
                         std::to_string(pred.class_scores.size()) + " predicted class scores");
  }
  LossBreakdown out;
  out.terms.cls = focal_class_loss(pred.class_scores[static_cast<std::size_t>(gt_category)], options.focal);
  const std::vector<double> targets = pats_targets(contour, pred.params.start, angles);
  out.terms.dist = dist_loss(targets, pred.params.distances);
  const MaskLoss mask = rmask_loss(contour, pred.params, angles, options.mask);
  out.terms.rmask = mask.value;
  out.degenerate = mask.degenerate;
  out.self_intersecting = mask.self_intersecting;
  out.total = weighted_objective(out.terms, weights);
  return out;
}

RefineResult refine_params(const PolarParams& previous, Point2 delta_start,
                           std::span<const double> delta_distances) {
  if (previous.distances.size() != delta_distances.size()) {
    throw DimensionError("refinement delta has " + std::to_string(delta_distances.size()) + " rays, expected " +
                         std::to_string(previous.distances.size()));
  }
  RefineResult out;
  out.params.start = previous.start + delta_start;
  out.params.distances.resize(previous.distances.size());
  for (std::size_t k = 0; k < delta_distances.size(); ++k) {
    const double d = previous.distances[k] + delta_distances[k];
    if (d < 0.0) ++out.clamp_events;
    out.params.distances[k] = std::max(0.0, d);
  }
  return out;
}

GradientReport fd_gradient(LossKind kind, const PolarParams& at, const Contour& contour,
                           const AngleSet& angles, const GradientOptions& options) {
  if (!(options.step > 0.0)) throw ParameterError("finite-difference step must be > 0");
  if (at.rays() != angles.size()) throw DimensionError("polar params and angle set disagree on K");
  if (!point_in_contour(contour, at.start)) {
    throw DomainError("gradient check needs a pole inside the contour");
  }

  // Detached targets and a pinned frame, both taken at the unperturbed point.
  const std::vector<double> targets = pats_targets(contour, at.start, angles);
  MaskLossOptions mask = options.mask;
  if (!mask.frame_box) mask.frame_box = loss_frame_box(reconstruct_polygon(at, angles), contour).scaled(1.1);

  auto loss = [&](const PolarParams& p) {
    const double base = kind == LossKind::kDist ? dist_loss(targets, p.distances)
                                                : rmask_loss(contour, p, angles, mask).value;
    return base + fault_term(p, options.fault);
  };

  const std::size_t k = at.distances.size();
  GradientReport report;
  report.gradient.assign(k + 2, 0.0);
  const double h = options.step;
  for (std::size_t i = 0; i < k + 2; ++i) {
    PolarParams plus = at;
    PolarParams minus = at;
    if (i == 0) {
      plus.start.x += h;
      minus.start.x -= h;
    } else if (i == 1) {
      plus.start.y += h;
      minus.start.y -= h;
    } else {
      plus.distances[i - 2] += h;
      minus.distances[i - 2] = std::max(0.0, minus.distances[i - 2] - h);
    }
    if (i < 2 && (!point_in_contour(contour, plus.start) || !point_in_contour(contour, minus.start))) {
      report.left_contour.push_back(i);
    }
    if (i >= 2 && kind == LossKind::kDist && std::abs(at.distances[i - 2] - targets[i - 2]) < h) {
      report.ambiguous.push_back(i);
    }
    const double span = i >= 2 ? plus.distances[i - 2] - minus.distances[i - 2] : 2.0 * h;
    report.gradient[i] = (loss(plus) - loss(minus)) / span;
  }
  return report;
}

void write_loss_csv(std::span<const LossRow> rows, std::ostream& out) {
  out << "instance_id,layer,L_class,L_dist,L_rmask,total\n";
  const auto old = out.precision(10);
  for (const LossRow& r : rows) {
    out << r.instance_id << "," << r.layer << "," << r.loss.terms.cls << "," << r.loss.terms.dist << ","
        << r.loss.terms.rmask << "," << r.loss.total << "\n";
  }
  out.precision(old);
}

}  // namespace polarseg
