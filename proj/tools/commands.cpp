#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polarseg/approximability.hpp"
#include "polarseg/attention_sampling.hpp"
#include "polarseg/dataset_eval.hpp"
#include "polarseg/errors.hpp"
#include "polarseg/geometry.hpp"
#include "polarseg/matching.hpp"
#include "polarseg/parallel.hpp"
#include "polarseg/supervision.hpp"
#include "polarseg/synthetic.hpp"

namespace polarseg::cli {
namespace {

using json = nlohmann::json;

// Data goes to a file or stdout; "-" and "" both mean stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) return std::cout.flush(), void();
    file_->close();
    if (file_->fail()) throw Error("failed writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw polarseg::ParseError(path + ": malformed JSON: " + e.what(), e.byte);
  }
}

const Contour& largest_ring(const InstanceAnnotation& a) {
  return *std::max_element(a.rings.begin(), a.rings.end(),
                           [](const Contour& x, const Contour& y) { return x.area() < y.area(); });
}

std::vector<const InstanceAnnotation*> sorted_instances(const AnnotationSet& set) {
  std::vector<const InstanceAnnotation*> out;
  for (const auto& a : set.annotations) out.push_back(&a);
  std::sort(out.begin(), out.end(), [](const auto* x, const auto* y) { return x->id < y->id; });
  return out;
}

AnnotationSet load_logged(const std::string& path) {
  AnnotationSet set = load_annotations(path);
  const LoadStats& s = set.stats;
  if (s.skipped_rle + s.skipped_crowd + s.skipped_rings + s.skipped_instances > 0) {
    std::cerr << "loaded " << set.annotations.size() << " instances; skipped " << s.skipped_rle << " RLE, "
              << s.skipped_crowd << " crowd, " << s.skipped_rings << " invalid rings, " << s.skipped_instances
              << " empty instances\n";
  }
  return set;
}

const InstanceAnnotation& find_instance(const AnnotationSet& set, long long id) {
  const InstanceAnnotation* a = set.find(id);
  if (!a) throw ParameterError("no annotation with id " + std::to_string(id));
  return *a;
}

void check_rays(const PolarParams& p, const AngleSet& angles, const std::string& what) {
  if (p.rays() != angles.size()) {
    throw DimensionError(what + " has " + std::to_string(p.rays()) + " distances but K = " +
                         std::to_string(angles.size()));
  }
}

PolarParams polar_from_json(const json& j) {
  const json& p = j.contains("polar") ? j.at("polar") : j;
  PolarParams out{{p.at("x").get<double>(), p.at("y").get<double>()}, p.at("distances").get<std::vector<double>>()};
  for (double d : out.distances) {
    if (!std::isfinite(d) || d < 0.0) throw ParameterError("radial distances must be finite and >= 0");
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void write_polygons_svg(const std::vector<Polygon>& polys, const std::string& path) {
  Output out(path);
  Box box{0, 0, 1, 1};
  bool first = true;
  for (const Polygon& p : polys) {
    if (p.size() == 0) continue;
    const Box b = bounding_box(p.vertices());
    box = first ? b : box.united(b);
    first = false;
  }
  const double margin = 0.05 * std::max(box.width(), box.height()) + 1.0;
  std::ostream& os = out.stream();
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << box.x0 - margin << " " << box.y0 - margin << " "
     << box.width() + 2 * margin << " " << box.height() + 2 * margin << "\">\n";
  for (const Polygon& p : polys) {
    os << "  <polygon fill=\"#1f77b4\" fill-opacity=\"0.3\" stroke=\"#1f77b4\" points=\"";
    for (const Point2& v : p.vertices()) os << v.x << "," << v.y << " ";
    os << "\"/>\n";
  }
  os << "</svg>\n";
  out.close();
}

}  // namespace

RunConfig CommonFlags::resolve() const {
  RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
  if (rays) cfg.rays = *rays;
  if (points) cfg.points = *points;
  if (rmask_resolution) cfg.rmask_resolution = *rmask_resolution;
  if (weights) cfg.apply_overrides("weights = [" + *weights + "]");
  if (grid_n) cfg.grid_n = *grid_n;
  if (jobs) cfg.jobs = *jobs;
  if (seed) cfg.seed = *seed;
  if (phase) cfg.phase = *phase;
  if (subset_fraction) cfg.subset_fraction = *subset_fraction;
  cfg.validate();
  return cfg;
}

int run_reconstruct(const ReconstructArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const json doc = parse_json_file(args.input);
  if (!doc.is_array()) throw polarseg::ParseError("reconstruct input must be a JSON array", 0);

  json result = json::array();
  std::vector<Polygon> polys;
  try {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const json& entry = doc[i];
      const PolarParams params = polar_from_json(entry);
      check_rays(params, angles, "entry " + std::to_string(i));
      const Polygon poly = reconstruct_polygon(params, angles);
      json flat = json::array();
      for (const Point2& v : poly.vertices()) {
        flat.push_back(v.x);
        flat.push_back(v.y);
      }
      json row{{"polygon", std::move(flat)}};
      row["id"] = entry.contains("id") ? entry.at("id") : json(i);
      result.push_back(std::move(row));
      polys.push_back(poly);
    }
  } catch (const json::exception& e) {
    throw polarseg::ParseError(std::string("invalid polar entry: ") + e.what(), 0);
  }

  Output out(args.output);
  out.stream() << result.dump(2) << "\n";
  out.close();
  if (!flags.svg_path.empty()) write_polygons_svg(polys, flags.svg_path);
  std::cerr << "reconstructed " << polys.size() << " polygons with K = " << angles.size() << "\n";
  return 0;
}

int run_targets(const TargetsArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const AnnotationSet set = load_logged(args.annotations);

  std::map<InstanceId, Point2> starts;
  if (!args.starts.empty()) {
    const json doc = parse_json_file(args.starts);
    try {
      for (const json& s : doc) {
        starts[s.at("instance_id").get<InstanceId>()] = {s.at("x").get<double>(), s.at("y").get<double>()};
      }
    } catch (const json::exception& e) {
      throw polarseg::ParseError(std::string("invalid starts file: ") + e.what(), 0);
    }
    for (const auto& [id, p] : starts) find_instance(set, id);
  }

  const auto instances = sorted_instances(set);
  std::vector<std::pair<Point2, std::vector<double>>> rows(instances.size());
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    const Contour& c = largest_ring(*instances[i]);
    const auto it = starts.find(instances[i]->id);
    const Point2 s = it != starts.end() ? it->second : interior_anchor(c);
    rows[i] = {s, pats_targets(c, s, angles)};
  });

  Output out(args.output);
  std::ostream& os = out.stream();
  os << std::setprecision(12) << "instance_id,start_x,start_y,K";
  for (int k = 0; k < angles.size(); ++k) os << ",d" << k;
  os << "\n";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    os << instances[i]->id << "," << rows[i].first.x << "," << rows[i].first.y << "," << angles.size();
    for (double d : rows[i].second) os << "," << d;
    os << "\n";
  }
  out.close();
  return 0;
}

int run_match(const MatchArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const AnnotationSet set = load_logged(args.annotations);
  const std::vector<PolygonDetection> dets = load_detections(args.predictions);
  if (args.per_gt < 1) throw ParameterError("--per-gt must be >= 1");

  std::map<int, std::size_t> category_slot;
  for (std::size_t i = 0; i < set.categories.size(); ++i) category_slot[set.categories[i].id] = i;

  struct ImageWork {
    std::vector<LayerPrediction> preds;
    std::vector<GtInstance> gts;
    std::vector<InstanceId> gt_ids;
  };
  std::map<ImageId, ImageWork> images;
  for (const InstanceAnnotation* a : sorted_instances(set)) {
    ImageWork& w = images[a->image_id];
    w.gts.push_back({largest_ring(*a), static_cast<int>(category_slot.at(a->category_id))});
    w.gt_ids.push_back(a->id);
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto* params = std::get_if<PolarParams>(&dets[i].geometry);
    if (!params) throw ParameterError("detection " + std::to_string(i) + " has no polar parameters");
    check_rays(*params, angles, "detection " + std::to_string(i));
    const auto slot = category_slot.find(dets[i].category_id);
    if (slot == category_slot.end()) {
      throw ParameterError("detection category " + std::to_string(dets[i].category_id) + " is unknown");
    }
    LayerPrediction p{1, *params, std::vector<double>(set.categories.size(), 0.0)};
    p.class_scores[slot->second] = dets[i].score;
    images[dets[i].image_id].preds.push_back(std::move(p));
  }

  MatchOptions options;
  options.mask.resolution = cfg.rmask_resolution;
  std::vector<ImageId> ids;
  for (const auto& [id, w] : images) ids.push_back(id);
  std::vector<CostMatrix> costs(ids.size());
  std::vector<Assignment> assignments(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    const ImageWork& w = images.at(ids[i]);
    costs[i] = build_cost_matrix(w.preds, w.gts, cfg.weights, angles, options);
    assignments[i] = hungarian(costs[i]);
  });

  Output out(args.output);
  std::ostream& os = out.stream();
  if (args.one_to_many) os << "image_id,pred_idx,gt_idx,total\n" << std::setprecision(10);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (args.one_to_many) {
      if (costs[i].total.empty()) continue;
      const double tau = args.tau ? *args.tau : default_one_to_many_tau(costs[i].total);
      for (const auto& [r, c] : one_to_many_assign(costs[i], args.per_gt, tau)) {
        os << ids[i] << "," << r << "," << c << "," << costs[i].total(r, c) << "\n";
        ++pairs;
      }
    } else {
      write_assignment_csv(std::to_string(ids[i]), assignments[i], costs[i], os, i == 0);
      pairs += assignments[i].pairs.size();
    }
  }
  if (ids.empty() && !args.one_to_many) {
    write_assignment_csv("", Assignment{}, CostMatrix{}, os, true);
  }
  out.close();

  if (!args.losses.empty()) {
    std::vector<LossRow> rows;
    LossOptions loss_options;
    loss_options.mask.resolution = cfg.rmask_resolution;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const ImageWork& w = images.at(ids[i]);
      for (const auto& [r, c] : assignments[i].pairs) {
        rows.push_back({std::to_string(w.gt_ids[c]), 1,
                        total_loss(w.preds[r], w.gts[c].contour, w.gts[c].category, cfg.weights, angles, loss_options)});
      }
    }
    Output loss_out(args.losses);
    write_loss_csv(rows, loss_out.stream());
    loss_out.close();
  }
  std::cerr << "matched " << pairs << " pairs over " << ids.size() << " images\n";
  return 0;
}

int run_score(const ScoreArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const AnnotationSet set = load_logged(args.annotations);
  const auto instances = sorted_instances(set);

  std::vector<std::optional<ApproxResult>> results(instances.size());
  std::vector<std::string> failures(instances.size());
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    try {
      results[i] = approximability_score(instances[i]->rings, angles, cfg.grid_n);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  Output out(args.output);
  std::ostream& os = out.stream();
  os << "instance_id,score,start_x,start_y,K,fragmented\n" << std::setprecision(10);
  std::vector<double> scores;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!results[i]) {
      std::cerr << "instance " << instances[i]->id << ": " << failures[i] << "\n";
      continue;
    }
    const ApproxResult& r = *results[i];
    os << instances[i]->id << "," << r.score << "," << r.optimal_start.x << "," << r.optimal_start.y << ","
       << angles.size() << "," << (r.fragmented ? 1 : 0) << "\n";
    scores.push_back(r.score);
  }
  out.close();

  if (scores.empty()) {
    std::cerr << "scored 0 instances\n";
  } else {
    std::cerr << std::setprecision(6) << "scored " << scores.size() << " instances (K = " << angles.size()
              << "): min " << quantile(scores, 0.0) << ", q25 " << quantile(scores, 0.25) << ", median "
              << quantile(scores, 0.5) << ", q75 " << quantile(scores, 0.75) << ", max " << quantile(scores, 1.0)
              << "\n";
  }
  return 0;
}

int run_landscape(const LandscapeArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AnnotationSet set = load_logged(args.annotations);
  const InstanceAnnotation& inst = find_instance(set, args.instance);
  const Landscape land = error_landscape(largest_ring(inst), cfg.angles(), cfg.grid_n, cfg.jobs);

  Output out(args.output);
  write_landscape_csv(land, out.stream());
  out.close();
  if (!args.pgm.empty()) {
    Output pgm(args.pgm);
    write_landscape_pgm(land, pgm.stream());
    pgm.close();
  }
  if (const auto lo = land.min()) {
    std::cerr << "representation error over " << cfg.grid_n << "x" << cfg.grid_n << " poles: min " << *lo << ", max "
              << *land.max() << "\n";
  } else {
    std::cerr << "no lattice point fell inside the instance\n";
  }
  return 0;
}

int run_grid(const GridArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const AnnotationSet set = load_logged(args.annotations);
  const Contour& contour = largest_ring(find_instance(set, args.instance));

  const bool polar = args.mode == "polar";
  const int heads = polar ? angles.size() : 8;
  const int points = polar ? cfg.points : 16;
  OffsetField offsets(heads, points);
  if (!args.offsets.empty()) {
    const json doc = parse_json_file(args.offsets);
    try {
      const int rows = static_cast<int>(doc.size());
      const int cols = rows > 0 ? static_cast<int>(doc.at(0).size()) : 0;
      if (polar && (rows != heads || cols != points)) {
        throw DimensionError("offsets are " + std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                             std::to_string(heads) + "x" + std::to_string(points));
      }
      offsets = OffsetField(rows, cols);
      for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(doc.at(r).size()) != cols) throw DimensionError("offset rows differ in length");
        for (int c = 0; c < cols; ++c) {
          const json& o = doc.at(r).at(c);
          offsets(r, c) = {o.at(0).get<double>(), o.at(1).get<double>()};
        }
      }
    } catch (const json::exception& e) {
      throw polarseg::ParseError(std::string("invalid offsets file: ") + e.what(), 0);
    }
  }

  SamplingGrid grid;
  if (polar) {
    const Point2 start = args.start ? Point2{(*args.start)[0], (*args.start)[1]} : interior_anchor(contour);
    const PolarParams params{start, ray_contour_intersect(contour, start, angles)};
    grid = polar_sampling_locations(params, angles, points, offsets);
  } else {
    const Box box = contour.bounds();
    const Point2 center = args.start ? Point2{(*args.start)[0], (*args.start)[1]} : box.center();
    grid = box_sampling_locations(center, box.width(), box.height(), offsets);
  }

  Output out(args.output);
  write_grid_csv(grid, out.stream());
  out.close();
  if (!flags.svg_path.empty()) {
    Output svg(flags.svg_path);
    write_grid_svg(grid, contour, svg.stream());
    svg.close();
  }
  const CoverageStats stats = grid_coverage_stats(grid, contour);
  std::cerr << args.mode << " grid " << grid.heads() << "x" << grid.points() << ": near-boundary "
            << stats.near_boundary << ", interior " << stats.interior << ", exterior " << stats.exterior << "\n";
  return 0;
}

namespace {

struct CheckResult {
  std::string name;
  int cases = 0;
  std::vector<std::string> failures;  // one line per failing case, with its seed
};

template <typename Fn>
CheckResult run_check(const std::string& name, int cases, std::uint64_t base_seed, Fn&& fn) {
  CheckResult r{name, cases, {}};
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    synthetic::Rng rng(seed);
    std::string why;
    try {
      why = fn(rng);
    } catch (const std::exception& e) {
      why = std::string("threw: ") + e.what();
    }
    if (!why.empty()) r.failures.push_back("seed " + std::to_string(seed) + ": " + why);
  }
  return r;
}

std::string format_ray(const char* what, std::size_t k, double got, double want) {
  std::ostringstream ss;
  ss << std::setprecision(8) << what << " ray " << k << ": got " << got << ", expected " << want;
  return ss.str();
}

}  // namespace

int run_gradcheck(const GradcheckArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AngleSet angles = cfg.angles();
  const std::size_t K = static_cast<std::size_t>(angles.size());
  const Point2 center{50, 50};
  GradientOptions grad;
  grad.fault = args.fault;
  grad.mask.resolution = cfg.rmask_resolution;

  std::vector<CheckResult> results;
  const bool dist = args.suite != "rmask-only";
  const bool rmask = args.suite != "dist-only";

  if (dist) {
    results.push_back(run_check("dist_hand_value", 1, cfg.seed, [](synthetic::Rng&) -> std::string {
      const std::vector<double> target{1, 2, 3, 4};
      const std::vector<double> pred{1.5, 2.5, 2.5, 3.5};
      const double v = dist_loss(target, pred);
      return v == 0.5 ? "" : "L1 of unit half-offsets is " + std::to_string(v);
    }));
    results.push_back(run_check("dist_subgradient", args.cases, cfg.seed, [&](synthetic::Rng& rng) -> std::string {
      const Contour c = synthetic::random_star(rng, center, 10, 40);
      const Point2 s = synthetic::random_interior_point(rng, c);
      const std::vector<double> targets = pats_targets(c, s, angles);
      PolarParams p{s, targets};
      std::uniform_real_distribution<double> delta(0.05, 3.0);
      std::bernoulli_distribution grow(0.5);
      for (double& d : p.distances) d = grow(rng) ? d + delta(rng) : std::max(0.0, d - delta(rng));
      const GradientReport g = fd_gradient(LossKind::kDist, p, c, angles, grad);
      if (g.gradient[0] != 0.0 || g.gradient[1] != 0.0) return "pole gradient is not zero";
      for (std::size_t k = 0; k < K; ++k) {
        const double diff = p.distances[k] - targets[k];
        if (std::abs(diff) < 10 * grad.step) continue;
        const double want = (diff > 0 ? 1.0 : -1.0) / static_cast<double>(K);
        if (std::abs(g.gradient[k + 2] - want) > 1e-6) return format_ray("d/dd", k, g.gradient[k + 2], want);
      }
      return "";
    }));
  }

  if (rmask) {
    MaskLossOptions mask;
    mask.resolution = cfg.rmask_resolution;
    results.push_back(
        run_check("rmask_self_reconstruction", args.cases, cfg.seed, [&](synthetic::Rng& rng) -> std::string {
          const Contour c = synthetic::random_convex(rng, center, 15, 40);
          const Point2 s = interior_anchor(c);
          const double loss = rmask_loss(c, {s, pats_targets(c, s, angles)}, angles, mask).value;
          return loss <= 0.02 ? "" : "self-reconstruction loss " + std::to_string(loss);
        }));
    results.push_back(run_check("rmask_interior_signs", args.cases, cfg.seed, [&](synthetic::Rng& rng) -> std::string {
      const Contour c = synthetic::random_convex(rng, center, 15, 40);
      const Point2 s = interior_anchor(c);
      PolarParams p{s, pats_targets(c, s, angles)};
      for (double& d : p.distances) d *= 0.7;
      const GradientReport g = fd_gradient(LossKind::kRmask, p, c, angles, grad);
      for (std::size_t k = 0; k < K; ++k) {
        PolarParams plus = p;
        PolarParams minus = p;
        plus.distances[k] += grad.step;
        minus.distances[k] -= grad.step;
        const double oracle = (exact_polygon_iou(reconstruct_polygon(minus, angles), c).iou -
                               exact_polygon_iou(reconstruct_polygon(plus, angles), c).iou) /
                              (2 * grad.step);
        if (g.gradient[k + 2] > 0.0 || std::signbit(g.gradient[k + 2]) != std::signbit(oracle)) {
          return format_ray("rmask slope sign", k, g.gradient[k + 2], oracle);
        }
      }
      return "";
    }));
  }

  bool ok = true;
  std::cout << std::left << std::setw(28) << "check" << std::setw(8) << "cases" << std::setw(8) << "failed"
            << "status\n";
  for (const CheckResult& r : results) {
    std::cout << std::setw(28) << r.name << std::setw(8) << r.cases << std::setw(8) << r.failures.size()
              << (r.failures.empty() ? "PASS" : "FAIL") << "\n";
    for (const std::string& f : r.failures) std::cerr << r.name << ": " << f << "\n";
    ok = ok && r.failures.empty();
  }
  std::cout.flush();
  return ok ? 0 : 1;
}

int run_eval(const EvalArgs& args, const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const AnnotationSet set = load_logged(args.annotations);
  const std::vector<PolygonDetection> dets = load_detections(args.detections);
  if (args.raster_resolution < 0) throw ParameterError("--raster-res must be >= 0");

  EvalOptions options;
  options.raster_resolution = args.raster_resolution;
  options.angle_phase = cfg.phase;
  options.jobs = cfg.jobs;

  EvalReport report;
  if (cfg.subset_fraction) {
    std::vector<std::pair<InstanceId, Contour>> instances;
    for (const InstanceAnnotation* a : sorted_instances(set)) instances.emplace_back(a->id, largest_ring(*a));
    const std::vector<InstanceId> keep =
        instances.empty() ? std::vector<InstanceId>{}
                          : rank_by_approximability(instances, cfg.angles(), *cfg.subset_fraction, cfg.grid_n, cfg.jobs);
    std::cerr << "subset: " << keep.size() << " of " << instances.size() << " instances (fraction "
              << *cfg.subset_fraction << ", K = " << cfg.rays << ")\n";
    report = evaluate_subset(set, dets, keep, options);
  } else {
    report = evaluate(set, dets, options);
  }

  Output out(args.output);
  out.stream() << report_to_json(report).dump(2) << "\n";
  out.close();
  if (!args.csv.empty()) {
    Output csv(args.csv);
    write_report_csv(report, csv.stream());
    csv.close();
  }
  if (report.empty) {
    std::cerr << "nothing to evaluate\n";
  } else {
    std::cerr << std::setprecision(4) << "mAP " << report.mAP << "  AP50 " << report.AP50 << "  AP75 " << report.AP75
              << "  (" << report.counts.images << " images, " << report.counts.evaluated_gts << " GT, "
              << report.counts.detections << " detections)\n";
  }
  return 0;
}

}  // namespace polarseg::cli
