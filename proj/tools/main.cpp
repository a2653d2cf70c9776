#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "polarseg/errors.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void add_common(CLI::App& app, polarseg::cli::CommonFlags& f) {
  app.add_option("--k", f.rays, "Number of rays K (default 32)");
  app.add_option("--t", f.points, "Sampling points per ray T (default 4)");
  app.add_option("--rmask-res", f.rmask_resolution, "RMask resolution (default 32)");
  app.add_option("--weights", f.weights, "Cost weights class,dist,rmask[,inner] (default 2,5,2,5)");
  app.add_option("--grid-n", f.grid_n, "Approximability search lattice (default 64)");
  app.add_option("--jobs", f.jobs, "Worker threads (default 1)");
  app.add_option("--seed", f.seed, "Seed for synthetic generators (default 0)");
  app.add_option("--phase", f.phase, "First ray angle in radians (default 0)");
  app.add_option("--subset-fraction", f.subset_fraction, "Evaluate only the most approximable fraction");
  app.add_option("--config", f.config_path, "key = value config file; flags take precedence");
  app.add_option("--svg", f.svg_path, "Also write an SVG rendering here");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace polarseg::cli;
  CLI::App app{"Polar polygon geometry, supervision and evaluation tools", "polarseg"};
  app.require_subcommand(1);
  CommonFlags flags;

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Polar parameters to explicit polygons");
  c_rec->add_option("input", rec.input, "JSON array of {x, y, distances}")->required();
  c_rec->add_option("-o,--output", rec.output, "Output JSON (default stdout)");

  TargetsArgs tgt;
  auto* c_tgt = app.add_subcommand("targets", "Ray-intersection distance targets per instance");
  c_tgt->add_option("annotations", tgt.annotations, "COCO-style annotation JSON")->required();
  c_tgt->add_option("--starts", tgt.starts, "JSON array of {instance_id, x, y}; default: an interior anchor");
  c_tgt->add_option("-o,--output", tgt.output, "Output CSV (default stdout)");

  MatchArgs mat;
  auto* c_mat = app.add_subcommand("match", "Cost matrices and assignments per image");
  c_mat->add_option("annotations", mat.annotations, "COCO-style annotation JSON")->required();
  c_mat->add_option("predictions", mat.predictions, "Detection JSON with polar parameters")->required();
  c_mat->add_option("-o,--output", mat.output, "Assignment CSV (default stdout)");
  c_mat->add_option("--losses", mat.losses, "Also write the loss breakdown of matched pairs");
  c_mat->add_flag("--one-to-many", mat.one_to_many, "Emit the one-to-many assignment instead");
  c_mat->add_option("--per-gt", mat.per_gt, "One-to-many: predictions per ground truth (default 4)");
  c_mat->add_option("--tau", mat.tau, "One-to-many: cost threshold (default 2x the matched median)");

  ScoreArgs sco;
  auto* c_sco = app.add_subcommand("score", "Approximability score per instance");
  c_sco->add_option("annotations", sco.annotations, "COCO-style annotation JSON")->required();
  c_sco->add_option("-o,--output", sco.output, "Output CSV (default stdout)");

  LandscapeArgs lan;
  auto* c_lan = app.add_subcommand("landscape", "Representation error over interior poles");
  c_lan->add_option("annotations", lan.annotations, "COCO-style annotation JSON")->required();
  c_lan->add_option("--instance", lan.instance, "Annotation id")->required();
  c_lan->add_option("-o,--output", lan.output, "CSV grid (default stdout)");
  c_lan->add_option("--pgm", lan.pgm, "Also write a PGM heat image");

  GridArgs grd;
  auto* c_grd = app.add_subcommand("grid", "Deformable-attention sampling locations");
  c_grd->add_option("annotations", grd.annotations, "COCO-style annotation JSON")->required();
  c_grd->add_option("--instance", grd.instance, "Annotation id")->required();
  c_grd->add_option("--start", grd.start, "Pole x y (default: an interior anchor)")->expected(2);
  c_grd->add_option("--mode", grd.mode, "polar or box")->check(CLI::IsMember({"polar", "box"}));
  c_grd->add_option("--offsets", grd.offsets, "JSON rows of [dx, dy] offsets");
  c_grd->add_option("-o,--output", grd.output, "Output CSV (default stdout)");

  GradcheckArgs grc;
  auto* c_grc = app.add_subcommand("gradcheck", "Finite-difference and invariant checks on synthetic shapes");
  c_grc->add_option("--suite", grc.suite, "all, dist-only or rmask-only")
      ->check(CLI::IsMember({"all", "dist-only", "rmask-only"}));
  c_grc->add_option("--cases", grc.cases, "Shapes per check (default 50)")->check(CLI::PositiveNumber);
  c_grc->add_option("--inject-fault", grc.fault, "Test hook: corrupt every loss by this multiple of sum(d)")
      ->group("");

  EvalArgs evl;
  auto* c_evl = app.add_subcommand("eval", "Mask AP of polygon detections");
  c_evl->add_option("annotations", evl.annotations, "COCO-style annotation JSON")->required();
  c_evl->add_option("detections", evl.detections, "Detection JSON")->required();
  c_evl->add_option("-o,--output", evl.output, "Report JSON (default stdout)");
  c_evl->add_option("--csv", evl.csv, "Also write a per-category CSV");
  c_evl->add_option("--raster-res", evl.raster_resolution, "Rasterize every pair at N x N (default: exact)");

  for (CLI::App* sub : app.get_subcommands({})) add_common(*sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_rec) return run_reconstruct(rec, flags);
    if (*c_tgt) return run_targets(tgt, flags);
    if (*c_mat) return run_match(mat, flags);
    if (*c_sco) return run_score(sco, flags);
    if (*c_lan) return run_landscape(lan, flags);
    if (*c_grd) return run_grid(grd, flags);
    if (*c_grc) return run_gradcheck(grc, flags);
    if (*c_evl) return run_eval(evl, flags);
  } catch (const polarseg::ParseError& e) {
    std::cerr << "error: " << e.what() << " (byte " << e.byte_offset() << ")\n";
    return kExitUsage;
  } catch (const polarseg::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const polarseg::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const polarseg::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const polarseg::GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
