#include "igmseg/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace igmseg {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "gen.count", "gen.rows", "gen.cols", "gen.min_instances",
      "gen.max_instances", "gen.min_radius", "gen.max_radius", "gen.base_mean",
      "gen.base_variance", "gen.corr_length", "gen.smooth_amplitude",
      "gen.noise_variance", "gen.bg_mean", "gen.bg_variance",
      "gen.touch_probability", "gen.seed",
      "model.bandwidth_grid", "model.holdout_count",
      "model.holdout_min_fraction", "model.holdout_max_fraction", "model.seed",
      "split.iterations", "split.d0", "split.smoothing_sigmas",
      "split.min_region", "split.max_depth", "split.d_schedule", "split.seed",
      "sweep.patch_size", "sweep.stride", "sweep.seed",
      "mws.alpha", "mws.min_segment",
      "eval.thresholds", "eval.sparse_gt",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key))
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return std::stod(get(key));
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  return std::stoi(get(key));
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return std::stoull(get(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean");
}

std::vector<double> Config::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

GenConfig Config::gen_config() const {
  GenConfig g;
  g.rows = get_int("gen.rows", g.rows);
  g.cols = get_int("gen.cols", g.cols);
  g.min_instances = get_int("gen.min_instances", g.min_instances);
  g.max_instances = get_int("gen.max_instances", g.max_instances);
  g.min_radius = get_double("gen.min_radius", g.min_radius);
  g.max_radius = get_double("gen.max_radius", g.max_radius);
  g.base_mean = get_double("gen.base_mean", g.base_mean);
  g.base_variance = get_double("gen.base_variance", g.base_variance);
  g.corr_length = get_double("gen.corr_length", g.corr_length);
  g.smooth_amplitude = get_double("gen.smooth_amplitude", g.smooth_amplitude);
  g.noise_variance = get_double("gen.noise_variance", g.noise_variance);
  g.bg_mean = get_double("gen.bg_mean", g.bg_mean);
  g.bg_variance = get_double("gen.bg_variance", g.bg_variance);
  g.touch_probability = get_double("gen.touch_probability", g.touch_probability);
  g.seed = get_u64("gen.seed", g.seed);
  return g;
}

SplitConfig Config::split_config() const {
  SplitConfig s;
  s.iterations = get_int("split.iterations", s.iterations);
  s.d0 = get_double("split.d0", s.d0);
  s.smoothing_sigmas = get_double_list("split.smoothing_sigmas", s.smoothing_sigmas);
  s.min_region = get_int("split.min_region", s.min_region);
  s.max_depth = get_int("split.max_depth", s.max_depth);
  s.d_schedule = get_bool("split.d_schedule", s.d_schedule);
  s.seed = get_u64("split.seed", s.seed);
  return s;
}

HoldoutSampler Config::holdout_sampler() const {
  HoldoutSampler h;
  h.count = get_int("model.holdout_count", h.count);
  h.min_fraction = get_double("model.holdout_min_fraction", h.min_fraction);
  h.max_fraction = get_double("model.holdout_max_fraction", h.max_fraction);
  return h;
}

std::vector<double> Config::bandwidth_grid() const {
  return get_double_list("model.bandwidth_grid", {1.0, 2.0, 4.0});
}

}  // namespace igmseg
