#pragma once

// COCO-style polygon annotations and detections, and mask AP over
// IoU thresholds 0.50:0.05:0.95 with 101-point interpolated precision.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarseg/approximability.hpp"
#include "polarseg/geometry.hpp"

namespace polarseg {

using ImageId = std::int64_t;

struct ImageInfo {
  ImageId id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
};

struct Category {
  int id = 0;
  std::string name;
};

struct InstanceAnnotation {
  InstanceId id = 0;
  ImageId image_id = 0;
  int category_id = 0;
  std::vector<Contour> rings;
  bool iscrowd = false;
  Box bbox;

  bool fragmented() const { return rings.size() > 1; }
};

struct LoadStats {
  std::size_t skipped_rle = 0;
  std::size_t skipped_crowd = 0;
  std::size_t skipped_rings = 0;      // rings with < 3 points or invalid geometry
  std::size_t skipped_instances = 0;  // instances left with no valid ring
};

struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::vector<InstanceAnnotation> annotations;
  LoadStats stats;

  const InstanceAnnotation* find(InstanceId id) const;
};

// Polygon-format segmentations only. RLE and crowd instances are skipped and
// counted; malformed JSON raises ParseError with the byte offset.
AnnotationSet parse_annotations(std::string_view json_text);
AnnotationSet load_annotations(const std::filesystem::path& path);
nlohmann::json annotations_to_json(const AnnotationSet& set);

struct PolygonDetection {
  ImageId image_id = 0;
  int category_id = 0;
  double score = 0.0;
  std::variant<PolarParams, Polygon> geometry;

  // Explicit polygons are returned as-is; polar ones are reconstructed with
  // K = number of distances and the given ray phase.
  Polygon polygon(double phase = 0.0) const;
};

std::vector<PolygonDetection> parse_detections(std::string_view json_text);
std::vector<PolygonDetection> load_detections(const std::filesystem::path& path);
nlohmann::json detections_to_json(std::span<const PolygonDetection> dets);

// The n highest-scoring payloads; equal scores keep input order.
template <typename T>
std::vector<T> topn_by_score(std::span<const std::pair<double, T>> candidates, std::size_t n) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].first > candidates[b].first; });
  order.resize(std::min(n, order.size()));
  std::vector<T> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(candidates[i].second);
  return out;
}

std::vector<double> coco_iou_thresholds();

struct EvalOptions {
  std::vector<double> iou_thresholds = coco_iou_thresholds();
  // 0: exact polygon IoU where both sides are single simple rings, pixel
  // rasterization otherwise. N > 0: every pair rasterized at N x N over the
  // image frame.
  int raster_resolution = 0;
  std::size_t max_dets_per_image = 100;
  double angle_phase = 0.0;
  int jobs = 1;
};

struct CategoryReport {
  std::string name;
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::size_t num_gt = 0;
  std::size_t num_dets = 0;
  bool evaluated = false;  // false when the category has no evaluated GT
};

struct EvalCounts {
  std::size_t images = 0;
  std::size_t gts = 0;
  std::size_t evaluated_gts = 0;
  std::size_t detections = 0;
  std::size_t dropped_detections = 0;  // unknown image ids
};

struct EvalReport {
  double mAP = 0.0;
  double AP50 = 0.0;
  double AP75 = 0.0;
  std::map<int, CategoryReport> per_category;
  EvalCounts counts;
  bool empty = false;  // nothing was evaluated

  friend bool operator==(const EvalReport&, const EvalReport&);
};

bool operator==(const CategoryReport& a, const CategoryReport& b);
bool operator==(const EvalCounts& a, const EvalCounts& b);

EvalReport evaluate(const AnnotationSet& gts, std::span<const PolygonDetection> dets, const EvalOptions& options = {});

// Ground truths outside `subset_ids` are ignored, as are detections matched
// to them. Unknown ids raise ParameterError.
EvalReport evaluate_subset(const AnnotationSet& gts, std::span<const PolygonDetection> dets,
                           std::span<const InstanceId> subset_ids, const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
void write_report_csv(const EvalReport& report, std::ostream& out);

}  // namespace polarseg
