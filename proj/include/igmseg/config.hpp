#ifndef IGMSEG_CONFIG_HPP
#define IGMSEG_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "igmseg/model.hpp"
#include "igmseg/splitter.hpp"
#include "igmseg/synth.hpp"

namespace igmseg {

// Flat key=value configuration with section prefixes (gen., model., split.,
// sweep., mws.). Unknown keys are errors; '#' starts a comment.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  GenConfig gen_config() const;
  SplitConfig split_config() const;
  HoldoutSampler holdout_sampler() const;
  std::vector<double> bandwidth_grid() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace igmseg

#endif
