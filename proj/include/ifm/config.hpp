// config.hpp - sectioned key/value run configuration.
//
//   # comment            ; comment
//   [experiment]
//   mode = sweep         # sweep | kappa_sweep | clustering | fcs
//   theta_max = pi/6     # numbers accept pi, * and /
//   N = 1:100            # integer range, or a comma list
//   lambda = linspace(-1, 1, 41)
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifm/error.hpp"
#include "ifm/experiments.hpp"

namespace ifm {

/// Parse or validation failure tied to a config line and/or key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string key);

  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Raw "section.key" -> value table with the line each key appeared on.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return entries_.contains(key); }
  const std::string& raw(const std::string& key) const;
  int line_of(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries_;
};

double parse_number(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

enum class RunMode { Sweep, KappaSweep, Clustering, Fcs };

const char* run_mode_name(RunMode mode);

struct RunConfig {
  std::string name = "run";
  RunMode mode = RunMode::Sweep;
  std::uint64_t seed = 0;

  SweepConfig sweep;                  // sweep, kappa_sweep
  std::vector<double> kappa_inverse;  // kappa_sweep
  ClusteringConfig clustering;        // clustering
  FcsConfig fcs;                      // fcs
  bool zero_frequency_check = false;  // fcs

  /// Applies a master seed to whichever experiment the mode selects.
  void set_seed(std::uint64_t value);
};

/// Builds a typed config; unknown or missing keys raise ConfigError naming the key.
RunConfig parse_run_config(const KeyValueFile& file);

}  // namespace ifm
