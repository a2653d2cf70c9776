#include "polarseg/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "polarseg/errors.hpp"

namespace polarseg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParameterError("config key '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParameterError("config key '" + key + "' expects an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_array(const std::string& key, const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ParameterError("config key '" + key + "' expects an array like [2, 5, 2, 5]");
  }
  std::vector<double> out;
  std::stringstream ss(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(parse_number(key, t));
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (rays < 3) throw ParameterError("K must be >= 3");
  if (points < 1) throw ParameterError("T must be >= 1");
  if (rmask_resolution < 2) throw ParameterError("RMask resolution must be >= 2");
  if (grid_n < 4) throw ParameterError("grid_n must be >= 4");
  if (subset_fraction && !(*subset_fraction > 0.0 && *subset_fraction <= 1.0)) {
    throw ParameterError("subset fraction must lie in (0, 1]");
  }
  weights.validate();
}

void RunConfig::apply_overrides(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(line_no) + " is not key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "k" || key == "rays") {
      rays = parse_int(key, value);
    } else if (key == "t" || key == "points") {
      points = parse_int(key, value);
    } else if (key == "rmask_res" || key == "rmask_resolution") {
      rmask_resolution = parse_int(key, value);
    } else if (key == "grid_n") {
      grid_n = parse_int(key, value);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "jobs") {
      jobs = parse_int(key, value);
    } else if (key == "phase") {
      phase = parse_number(key, value);
    } else if (key == "subset_fraction") {
      subset_fraction = parse_number(key, value);
    } else if (key == "weights") {
      const std::vector<double> w = parse_array(key, value);
      if (w.size() != 3 && w.size() != 4) throw ParameterError("weights take 3 or 4 values");
      weights.lambda_class = w[0];
      weights.lambda_dist = w[1];
      weights.lambda_rmask = w[2];
      if (w.size() == 4) weights.lambda_inner = w[3];
    } else if (key == "lambda_inner") {
      weights.lambda_inner = parse_number(key, value);
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  cfg.apply_overrides(ss.str());
  return cfg;
}

}  // namespace polarseg
