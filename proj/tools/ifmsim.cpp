// ifmsim - command-line front end for the detector simulations.
#include <iostream>

#include <CLI11.hpp>

#include "ifm/cli.hpp"
#include "ifm/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Interaction-free noise detection simulator"};
  app.require_subcommand(1);

  ifm::CommandOptions options;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string format = "csv";

  const auto common = [&](CLI::App* cmd, bool with_config, bool with_seed) {
    if (with_config) cmd->add_option("--config", config_path, "Run configuration file")->required();
    cmd->add_option("--out", options.out_dir, "Output directory");
    if (with_seed) cmd->add_option("--seed", seed, "Master seed (overrides config and env)");
    cmd->add_option("--threads", options.threads, "Worker cap (0 = all cores)");
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep from a config file");
  common(sweep, true, true);
  auto* table = app.add_subcommand("table1", "N = 4 two-pi-pulse configurations");
  common(table, false, false);
  auto* fcs = app.add_subcommand("fcs", "Counting-statistics generating function");
  common(fcs, true, true);

  ifm::NoiseOptions noise;
  std::string color;
  double sample_rate = 0.0;
  auto* noise_cmd = app.add_subcommand("noise", "Generate a noise ensemble and its spectrum");
  common(noise_cmd, false, true);
  noise_cmd->add_option("--color", color, "white, pink, brown, blue or purple");
  noise_cmd->add_flag("--telegraph", noise.telegraph, "Random telegraph noise");
  noise_cmd->add_option("--kappa", noise.kappa, "Telegraph switching rate (Hz)");
  noise_cmd->add_option("--amplitude", noise.amplitude, "Telegraph level");
  noise_cmd->add_option("--samples", noise.samples, "Samples per trace");
  noise_cmd->add_option("--sample-rate", sample_rate, "Samples per second");
  noise_cmd->add_option("--traces", noise.traces, "Ensemble size");

  app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ifm::kExitConfig;
  }

  options.format = format == "json" ? ifm::OutputFormat::Json : ifm::OutputFormat::Csv;
  if (options.threads == 0) options.threads = ifm::default_thread_count();
  const auto seeded = [&](CLI::App* cmd) {
    if (cmd->count("--seed") > 0) options.seed = seed;
  };

  if (*sweep) {
    seeded(sweep);
    return ifm::cmd_sweep(config_path, options, std::cout, std::cerr);
  }
  if (*table) return ifm::cmd_table1(options, std::cout, std::cerr);
  if (*fcs) {
    seeded(fcs);
    return ifm::cmd_fcs(config_path, options, std::cout, std::cerr);
  }
  if (*noise_cmd) {
    if (noise_cmd->count("--color") > 0) noise.color = color;
    if (noise_cmd->count("--sample-rate") > 0) noise.sample_rate = sample_rate;
    if (noise_cmd->count("--seed") > 0) noise.seed = seed;
    return ifm::cmd_noise(noise, options, std::cout, std::cerr);
  }
  std::cout << "ifmsim " << ifm::kToolVersion << '\n';
  return 0;
}
