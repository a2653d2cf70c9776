#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "polarseg/approximability.hpp"
#include "polarseg/attention_sampling.hpp"
#include "polarseg/geometry.hpp"
#include "polarseg/rasterizer.hpp"
#include "polarseg/supervision.hpp"

namespace polarseg {

struct RunConfig {
  int rays = AngleSet::kDefaultRays;
  int points = kDefaultSamplePoints;
  int rmask_resolution = SoftMask::kDefaultResolution;
  CostWeights weights;
  int grid_n = kDefaultSearchGrid;
  std::uint64_t seed = 0;
  double phase = 0.0;
  int jobs = 1;
  std::optional<double> subset_fraction;

  void validate() const;
  AngleSet angles() const { return AngleSet(rays, phase); }

  // Applies `key = value` lines (TOML subset: integers, floats, and a float
  // array for `weights`; `#` comments). Unknown keys raise ParameterError.
  void apply_overrides(std::string_view text);
  static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace polarseg
