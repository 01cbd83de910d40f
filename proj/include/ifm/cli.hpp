// cli.hpp - subcommand implementations behind the ifmsim front end.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifm/config.hpp"

namespace ifm {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSeedEnvVar = "IFMSIM_SEED";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

enum class OutputFormat { Csv, Json };

struct CommandOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0 = available parallelism
  OutputFormat format = OutputFormat::Csv;
  bool use_env_seed = true;
};

struct NoiseOptions {
  std::optional<std::string> color;
  bool telegraph = false;
  double kappa = 0.0;
  double amplitude = 1.0;
  std::size_t samples = 65536;
  std::optional<double> sample_rate;  // default 1 (colored) or 100 kappa (telegraph)
  std::size_t traces = 16;
  std::uint64_t seed = 0;
};

/// Shortest decimal form that round-trips, up to 17 significant digits.
std::string format_double(double value);

/// Quotes a CSV field if it contains a delimiter, quote or newline.
std::string csv_field(const std::string& text);

nlohmann::json config_to_json(const RunConfig& config);

/// FNV-1a 64 over the compact dump of `canonical` (object keys sorted), as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

std::string stats_csv(const std::vector<GridPoint>& points, std::uint64_t seed);

int cmd_sweep(const std::string& config_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_table1(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_fcs(const std::string& config_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err);
int cmd_noise(const NoiseOptions& noise, const CommandOptions& options, std::ostream& out,
              std::ostream& err);

}  // namespace ifm
