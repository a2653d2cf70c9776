#include "polarseg/dataset_eval.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "polarseg/errors.hpp"
#include "polarseg/parallel.hpp"
#include "polarseg/rasterizer.hpp"

namespace polarseg {
namespace {

using json = nlohmann::json;

constexpr int kRecallPoints = 101;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

std::vector<Point2> interleaved_points(const json& flat) {
  std::vector<Point2> pts;
  if (!flat.is_array()) return pts;
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    pts.push_back({flat[i].get<double>(), flat[i + 1].get<double>()});
  }
  return pts;
}

Box rings_bbox(const std::vector<Contour>& rings) {
  Box box = rings.front().bounds();
  for (const Contour& c : rings) box = box.united(c.bounds());
  return box;
}

struct Prepared {
  const PolygonDetection* det;
  std::size_t input_index;
  std::optional<Polygon> polygon;  // empty for degenerate detections
  bool simple = true;
};

// IoU between a detection polygon and a ground-truth instance.
double pair_iou(const Prepared& det, const InstanceAnnotation& gt, const ImageInfo* image, const EvalOptions& opt) {
  if (!det.polygon) return 0.0;
  const Polygon& poly = *det.polygon;
  if (opt.raster_resolution <= 0 && gt.rings.size() == 1 && det.simple) {
    return exact_polygon_iou(poly, gt.rings.front()).iou;
  }
  std::vector<std::vector<Point2>> gt_rings;
  for (const Contour& c : gt.rings) gt_rings.emplace_back(c.vertices().begin(), c.vertices().end());
  const std::vector<std::vector<Point2>> det_rings{{poly.vertices().begin(), poly.vertices().end()}};
  Frame frame;
  int cols = 0;
  int rows = 0;
  if (opt.raster_resolution > 0) {
    Box box = image && image->width > 0 && image->height > 0
                  ? Box{0.0, 0.0, static_cast<double>(image->width), static_cast<double>(image->height)}
                  : gt.bbox.united(bounding_box(poly.vertices()));
    cols = rows = opt.raster_resolution;
    frame = Frame::over_box(box, cols, rows);
  } else {
    // One cell per image pixel, restricted to the pixels the pair can touch.
    const Box box = gt.bbox.united(bounding_box(poly.vertices()));
    const double x0 = std::floor(box.x0);
    const double y0 = std::floor(box.y0);
    cols = std::max(2, static_cast<int>(std::ceil(box.x1) - x0));
    rows = std::max(2, static_cast<int>(std::ceil(box.y1) - y0));
    frame = Frame{1.0, 0.0, 0.0, 1.0, x0, y0};
  }
  const SoftMask a = rasterize_rings(det_rings, cols, rows, frame);
  const SoftMask b = rasterize_rings(gt_rings, cols, rows, frame);
  const IouResult r = soft_iou(a, b);
  return r.degenerate ? 0.0 : r.iou;
}

struct DetRecord {
  double score;
  std::size_t input_index;
  // Per threshold: 0 = false positive, 1 = true positive, 2 = ignored.
  std::vector<char> status;
};

double interpolated_ap(const std::vector<const DetRecord*>& sorted, std::size_t threshold, std::size_t npig) {
  std::vector<double> recall;
  std::vector<double> precision;
  double tp = 0.0;
  double fp = 0.0;
  for (const DetRecord* d : sorted) {
    const char s = d->status[threshold];
    if (s == 2) continue;
    if (s == 1) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    recall.push_back(tp / static_cast<double>(npig));
    precision.push_back(tp / (tp + fp));
  }
  for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double level = r / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

std::optional<std::size_t> threshold_index(const std::vector<double>& thresholds, double value) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - value) < 1e-9) return i;
  }
  return std::nullopt;
}

EvalReport run_evaluation(const AnnotationSet& gts, std::span<const PolygonDetection> dets,
                          const std::unordered_set<InstanceId>* subset, const EvalOptions& opt) {
  if (opt.iou_thresholds.empty()) throw ParameterError("evaluation needs at least one IoU threshold");
  for (double t : opt.iou_thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("IoU thresholds must lie in [0,1]");
  }
  std::map<int, std::string> category_names;
  for (const Category& c : gts.categories) category_names[c.id] = c.name;
  for (const PolygonDetection& d : dets) {
    if (!category_names.contains(d.category_id)) {
      throw ParameterError("detection category " + std::to_string(d.category_id) + " is not in the annotation categories");
    }
  }

  std::unordered_map<ImageId, const ImageInfo*> images;
  for (const ImageInfo& im : gts.images) images[im.id] = &im;

  EvalReport report;
  report.counts.images = gts.images.size();
  report.counts.gts = gts.annotations.size();
  report.counts.detections = dets.size();

  // Group by (category, image).
  using Key = std::pair<int, ImageId>;
  std::map<Key, std::vector<const InstanceAnnotation*>> gt_groups;
  std::map<Key, std::vector<Prepared>> det_groups;
  for (const InstanceAnnotation& a : gts.annotations) gt_groups[{a.category_id, a.image_id}].push_back(&a);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const PolygonDetection& d = dets[i];
    if (!images.contains(d.image_id)) {
      ++report.counts.dropped_detections;
      continue;
    }
    Prepared p{&d, i, std::nullopt, true};
    const Polygon poly = d.polygon(opt.angle_phase);
    if (polygon_area(poly) > 0.0) {
      p.simple = is_simple(poly.vertices());
      p.polygon = poly;
    }
    det_groups[{d.category_id, d.image_id}].push_back(std::move(p));
  }

  std::set<Key> keys;
  for (const auto& [k, _] : gt_groups) keys.insert(k);
  for (const auto& [k, _] : det_groups) keys.insert(k);
  const std::vector<Key> key_list(keys.begin(), keys.end());

  const std::size_t nt = opt.iou_thresholds.size();
  std::vector<std::vector<DetRecord>> records(key_list.size());
  std::vector<std::size_t> evaluated_gt(key_list.size(), 0);

  parallel_for(key_list.size(), opt.jobs, [&](std::size_t g) {
    const Key key = key_list[g];
    std::vector<const InstanceAnnotation*> gt_list;
    if (auto it = gt_groups.find(key); it != gt_groups.end()) gt_list = it->second;
    std::vector<char> ignored(gt_list.size(), 0);
    for (std::size_t j = 0; j < gt_list.size(); ++j) {
      ignored[j] = subset && !subset->contains(gt_list[j]->id);
    }
    // Evaluated ground truths first, as in the reference protocol.
    std::vector<std::size_t> gorder(gt_list.size());
    std::iota(gorder.begin(), gorder.end(), std::size_t{0});
    std::stable_sort(gorder.begin(), gorder.end(), [&](std::size_t a, std::size_t b) { return ignored[a] < ignored[b]; });
    for (std::size_t j = 0; j < gt_list.size(); ++j) evaluated_gt[g] += !ignored[j];

    std::vector<Prepared> det_list;
    if (auto it = det_groups.find(key); it != det_groups.end()) det_list = it->second;
    std::stable_sort(det_list.begin(), det_list.end(), [](const Prepared& a, const Prepared& b) {
      if (a.det->score != b.det->score) return a.det->score > b.det->score;
      return a.input_index < b.input_index;
    });
    if (det_list.size() > opt.max_dets_per_image) det_list.resize(opt.max_dets_per_image);

    const ImageInfo* image = images.contains(key.second) ? images.at(key.second) : nullptr;
    std::vector<double> ious(det_list.size() * gt_list.size());
    for (std::size_t i = 0; i < det_list.size(); ++i) {
      for (std::size_t j = 0; j < gt_list.size(); ++j) {
        ious[i * gt_list.size() + j] = pair_iou(det_list[i], *gt_list[gorder[j]], image, opt);
      }
    }

    std::vector<DetRecord> out(det_list.size());
    for (std::size_t i = 0; i < det_list.size(); ++i) {
      out[i] = {det_list[i].det->score, det_list[i].input_index, std::vector<char>(nt, 0)};
    }
    for (std::size_t t = 0; t < nt; ++t) {
      std::vector<char> gt_taken(gt_list.size(), 0);
      for (std::size_t i = 0; i < det_list.size(); ++i) {
        double best = std::min(opt.iou_thresholds[t], 1.0 - 1e-10);
        std::optional<std::size_t> match;
        for (std::size_t j = 0; j < gt_list.size(); ++j) {
          const bool ign = ignored[gorder[j]];
          // Ignored ground truths may absorb any number of detections.
          if (gt_taken[j] && !ign) continue;
          if (match && !ignored[gorder[*match]] && ign) break;
          const double iou = ious[i * gt_list.size() + j];
          if (iou < best) continue;
          best = iou;
          match = j;
        }
        if (!match) continue;
        gt_taken[*match] = 1;
        out[i].status[t] = ignored[gorder[*match]] ? 2 : 1;
      }
    }
    records[g] = std::move(out);
  });

  std::map<int, std::vector<const DetRecord*>> by_category;
  std::map<int, std::size_t> npig;
  std::map<int, std::size_t> num_gt;
  for (std::size_t g = 0; g < key_list.size(); ++g) {
    const int cat = key_list[g].first;
    npig[cat] += evaluated_gt[g];
    if (auto it = gt_groups.find(key_list[g]); it != gt_groups.end()) num_gt[cat] += it->second.size();
    for (const DetRecord& r : records[g]) by_category[cat].push_back(&r);
  }

  const auto i50 = threshold_index(opt.iou_thresholds, 0.5);
  const auto i75 = threshold_index(opt.iou_thresholds, 0.75);
  double sum_all = 0.0;
  double sum50 = 0.0;
  double sum75 = 0.0;
  std::size_t n_all = 0;
  std::size_t n_cat = 0;
  for (const auto& [cat, name] : category_names) {
    CategoryReport cr;
    cr.name = name;
    cr.num_gt = num_gt[cat];
    std::vector<const DetRecord*> sorted = by_category[cat];
    cr.num_dets = sorted.size();
    const std::size_t positives = npig[cat];
    report.counts.evaluated_gts += positives;
    if (positives > 0) {
      std::sort(sorted.begin(), sorted.end(), [](const DetRecord* a, const DetRecord* b) {
        if (a->score != b->score) return a->score > b->score;
        return a->input_index < b->input_index;
      });
      cr.evaluated = true;
      double cat_sum = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        const double ap = interpolated_ap(sorted, t, positives);
        cat_sum += ap;
        sum_all += ap;
        ++n_all;
        if (i50 && t == *i50) cr.ap50 = ap;
        if (i75 && t == *i75) cr.ap75 = ap;
      }
      cr.ap = cat_sum / static_cast<double>(nt);
      sum50 += cr.ap50;
      sum75 += cr.ap75;
      ++n_cat;
    }
    report.per_category[cat] = cr;
  }
  if (n_all == 0) {
    report.empty = true;
    return report;
  }
  report.mAP = sum_all / static_cast<double>(n_all);
  report.AP50 = i50 ? sum50 / static_cast<double>(n_cat) : std::nan("");
  report.AP75 = i75 ? sum75 / static_cast<double>(n_cat) : std::nan("");
  return report;
}

}  // namespace

const InstanceAnnotation* AnnotationSet::find(InstanceId id) const {
  for (const InstanceAnnotation& a : annotations) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

AnnotationSet parse_annotations(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw ParseError("annotation file must hold a JSON object", 0);
  AnnotationSet set;
  try {
    if (doc.contains("images")) {
      for (const json& im : doc.at("images")) {
        ImageInfo info;
        info.id = im.at("id").get<ImageId>();
        info.width = im.value("width", 0);
        info.height = im.value("height", 0);
        info.file_name = im.value("file_name", std::string{});
        set.images.push_back(std::move(info));
      }
    }
    if (doc.contains("categories")) {
      for (const json& c : doc.at("categories")) {
        set.categories.push_back({c.at("id").get<int>(), c.value("name", std::string{})});
      }
    }
    std::set<int> known_categories;
    for (const Category& c : set.categories) known_categories.insert(c.id);
    std::set<ImageId> known_images;
    for (const ImageInfo& im : set.images) known_images.insert(im.id);

    InstanceId next_id = 1;
    for (const json& a : doc.value("annotations", json::array())) {
      InstanceAnnotation inst;
      inst.id = a.contains("id") ? a.at("id").get<InstanceId>() : next_id;
      next_id = std::max(next_id, inst.id + 1);
      inst.image_id = a.at("image_id").get<ImageId>();
      inst.category_id = a.at("category_id").get<int>();
      inst.iscrowd = a.value("iscrowd", 0) != 0;
      if (!set.categories.empty() && !known_categories.contains(inst.category_id)) {
        throw ParameterError("annotation " + std::to_string(inst.id) + " uses unknown category " +
                             std::to_string(inst.category_id));
      }
      const json& seg = a.contains("segmentation") ? a.at("segmentation") : json();
      if (!seg.is_array()) {
        ++set.stats.skipped_rle;
        continue;
      }
      if (inst.iscrowd) {
        ++set.stats.skipped_crowd;
        continue;
      }
      for (const json& ring : seg) {
        std::vector<Point2> pts = interleaved_points(ring);
        if (pts.size() < 3) {
          ++set.stats.skipped_rings;
          continue;
        }
        try {
          inst.rings.emplace_back(std::move(pts));
        } catch (const GeometryError&) {
          ++set.stats.skipped_rings;
        }
      }
      if (inst.rings.empty()) {
        ++set.stats.skipped_instances;
        continue;
      }
      if (a.contains("bbox") && a.at("bbox").is_array() && a.at("bbox").size() == 4) {
        const json& b = a.at("bbox");
        const double x = b[0].get<double>();
        const double y = b[1].get<double>();
        inst.bbox = {x, y, x + b[2].get<double>(), y + b[3].get<double>()};
      } else {
        inst.bbox = rings_bbox(inst.rings);
      }
      if (!doc.contains("images") && !known_images.contains(inst.image_id)) {
        known_images.insert(inst.image_id);
        set.images.push_back({inst.image_id, 0, 0, {}});
      }
      set.annotations.push_back(std::move(inst));
    }
    if (set.categories.empty()) {
      std::set<int> ids;
      for (const InstanceAnnotation& a : set.annotations) ids.insert(a.category_id);
      for (int id : ids) set.categories.push_back({id, std::to_string(id)});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid annotation file: ") + e.what(), 0);
  }
  return set;
}

AnnotationSet load_annotations(const std::filesystem::path& path) { return parse_annotations(read_file(path)); }

json annotations_to_json(const AnnotationSet& set) {
  json doc;
  doc["images"] = json::array();
  for (const ImageInfo& im : set.images) {
    doc["images"].push_back({{"id", im.id}, {"width", im.width}, {"height", im.height}, {"file_name", im.file_name}});
  }
  doc["categories"] = json::array();
  for (const Category& c : set.categories) doc["categories"].push_back({{"id", c.id}, {"name", c.name}});
  doc["annotations"] = json::array();
  for (const InstanceAnnotation& a : set.annotations) {
    json seg = json::array();
    double area = 0.0;
    for (const Contour& c : a.rings) {
      json flat = json::array();
      for (const Point2& p : c.vertices()) {
        flat.push_back(p.x);
        flat.push_back(p.y);
      }
      seg.push_back(std::move(flat));
      area += c.area();
    }
    doc["annotations"].push_back({{"id", a.id},
                                  {"image_id", a.image_id},
                                  {"category_id", a.category_id},
                                  {"iscrowd", a.iscrowd ? 1 : 0},
                                  {"area", area},
                                  {"bbox", {a.bbox.x0, a.bbox.y0, a.bbox.width(), a.bbox.height()}},
                                  {"segmentation", std::move(seg)}});
  }
  return doc;
}

Polygon PolygonDetection::polygon(double phase) const {
  if (const auto* poly = std::get_if<Polygon>(&geometry)) return *poly;
  const PolarParams& params = std::get<PolarParams>(geometry);
  return reconstruct_polygon(params, AngleSet(params.rays(), phase));
}

std::vector<PolygonDetection> parse_detections(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_array()) throw ParseError("detection file must hold a JSON array", 0);
  std::vector<PolygonDetection> out;
  out.reserve(doc.size());
  try {
    for (const json& d : doc) {
      PolygonDetection det{d.at("image_id").get<ImageId>(), d.at("category_id").get<int>(), d.at("score").get<double>(),
                           PolarParams{}};
      if (!(det.score >= 0.0 && det.score <= 1.0)) throw ParameterError("detection score must lie in [0,1]");
      if (d.contains("polar")) {
        const json& p = d.at("polar");
        PolarParams params{{p.at("x").get<double>(), p.at("y").get<double>()},
                           p.at("distances").get<std::vector<double>>()};
        if (params.rays() < 3) throw ParameterError("polar detection needs at least 3 distances");
        for (double v : params.distances) {
          if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("polar distances must be finite and >= 0");
        }
        det.geometry = std::move(params);
      } else if (d.contains("polygon")) {
        det.geometry = Polygon(interleaved_points(d.at("polygon")));
      } else {
        throw ParameterError("detection carries neither 'polar' nor 'polygon'");
      }
      out.push_back(std::move(det));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid detection file: ") + e.what(), 0);
  }
  return out;
}

std::vector<PolygonDetection> load_detections(const std::filesystem::path& path) {
  return parse_detections(read_file(path));
}

json detections_to_json(std::span<const PolygonDetection> dets) {
  json out = json::array();
  for (const PolygonDetection& d : dets) {
    json j{{"image_id", d.image_id}, {"category_id", d.category_id}, {"score", d.score}};
    if (const auto* p = std::get_if<PolarParams>(&d.geometry)) {
      j["polar"] = {{"x", p->start.x}, {"y", p->start.y}, {"distances", p->distances}};
    } else {
      json flat = json::array();
      for (const Point2& v : std::get<Polygon>(d.geometry).vertices()) {
        flat.push_back(v.x);
        flat.push_back(v.y);
      }
      j["polygon"] = std::move(flat);
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

bool operator==(const CategoryReport& a, const CategoryReport& b) {
  return a.name == b.name && a.ap == b.ap && a.ap50 == b.ap50 && a.ap75 == b.ap75 && a.num_gt == b.num_gt &&
         a.num_dets == b.num_dets && a.evaluated == b.evaluated;
}

bool operator==(const EvalCounts& a, const EvalCounts& b) {
  return a.images == b.images && a.gts == b.gts && a.evaluated_gts == b.evaluated_gts &&
         a.detections == b.detections && a.dropped_detections == b.dropped_detections;
}

bool operator==(const EvalReport& a, const EvalReport& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return same(a.mAP, b.mAP) && same(a.AP50, b.AP50) && same(a.AP75, b.AP75) && a.per_category == b.per_category &&
         a.counts == b.counts && a.empty == b.empty;
}

EvalReport evaluate(const AnnotationSet& gts, std::span<const PolygonDetection> dets, const EvalOptions& options) {
  return run_evaluation(gts, dets, nullptr, options);
}

EvalReport evaluate_subset(const AnnotationSet& gts, std::span<const PolygonDetection> dets,
                           std::span<const InstanceId> subset_ids, const EvalOptions& options) {
  std::unordered_set<InstanceId> known;
  for (const InstanceAnnotation& a : gts.annotations) known.insert(a.id);
  std::unordered_set<InstanceId> subset;
  for (InstanceId id : subset_ids) {
    if (!known.contains(id)) throw ParameterError("subset id " + std::to_string(id) + " is not a ground-truth instance");
    subset.insert(id);
  }
  EvalReport report = run_evaluation(gts, dets, &subset, options);
  if (subset.empty()) report.empty = true;
  return report;
}

json report_to_json(const EvalReport& report) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json per = json::object();
  for (const auto& [id, c] : report.per_category) {
    per[std::to_string(id)] = {{"name", c.name},           {"AP", num(c.ap)},         {"AP50", num(c.ap50)},
                               {"AP75", num(c.ap75)},      {"num_gt", c.num_gt},      {"num_dets", c.num_dets},
                               {"evaluated", c.evaluated}};
  }
  return {{"mAP", num(report.mAP)},
          {"AP50", num(report.AP50)},
          {"AP75", num(report.AP75)},
          {"empty", report.empty},
          {"per_category", std::move(per)},
          {"counts",
           {{"images", report.counts.images},
            {"gts", report.counts.gts},
            {"evaluated_gts", report.counts.evaluated_gts},
            {"detections", report.counts.detections},
            {"dropped_detections", report.counts.dropped_detections}}}};
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  const auto old = out.precision(10);
  out << "category_id,name,AP,AP50,AP75,num_gt,num_dets\n";
  for (const auto& [id, c] : report.per_category) {
    out << id << "," << c.name << "," << c.ap << "," << c.ap50 << "," << c.ap75 << "," << c.num_gt << "," << c.num_dets
        << "\n";
  }
  out << "all,," << report.mAP << "," << report.AP50 << "," << report.AP75 << "," << report.counts.evaluated_gts << ","
      << report.counts.detections << "\n";
  out.precision(old);
}

}  // namespace polarseg
