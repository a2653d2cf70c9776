#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polarseg/run_config.hpp"

namespace polarseg::cli {

// Flag values as typed on the command line; unset ones fall back to the
// config file, then to built-in defaults.
struct CommonFlags {
  std::optional<int> rays;
  std::optional<int> points;
  std::optional<int> rmask_resolution;
  std::optional<std::string> weights;
  std::optional<int> grid_n;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> phase;
  std::optional<double> subset_fraction;
  std::string config_path;
  std::string svg_path;

  RunConfig resolve() const;
};

struct ReconstructArgs {
  std::string input;
  std::string output;
};

struct TargetsArgs {
  std::string annotations;
  std::string starts;
  std::string output;
};

struct MatchArgs {
  std::string annotations;
  std::string predictions;
  std::string output;
  std::string losses;
  bool one_to_many = false;
  int per_gt = 4;
  std::optional<double> tau;
};

struct ScoreArgs {
  std::string annotations;
  std::string output;
};

struct LandscapeArgs {
  std::string annotations;
  long long instance = 0;
  std::string output;
  std::string pgm;
};

struct GridArgs {
  std::string annotations;
  long long instance = 0;
  std::optional<std::vector<double>> start;
  std::string mode = "polar";
  std::string offsets;
  std::string output;
};

struct GradcheckArgs {
  std::string suite = "all";
  int cases = 50;
  double fault = 0.0;
};

struct EvalArgs {
  std::string annotations;
  std::string detections;
  std::string output;
  std::string csv;
  int raster_resolution = 0;
};

int run_reconstruct(const ReconstructArgs& args, const CommonFlags& flags);
int run_targets(const TargetsArgs& args, const CommonFlags& flags);
int run_match(const MatchArgs& args, const CommonFlags& flags);
int run_score(const ScoreArgs& args, const CommonFlags& flags);
int run_landscape(const LandscapeArgs& args, const CommonFlags& flags);
int run_grid(const GridArgs& args, const CommonFlags& flags);
int run_gradcheck(const GradcheckArgs& args, const CommonFlags& flags);
int run_eval(const EvalArgs& args, const CommonFlags& flags);

}  // namespace polarseg::cli
