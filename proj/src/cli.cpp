#include "ifm/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ifm/rng.hpp"

namespace ifm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fixed3(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return ec == std::errc{} ? std::string(buf, end) : "nan";
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << content;
    f.close();
    if (!f) throw Error("failed writing '" + path.string() + "'");
    written_.push_back(path.string());
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

struct ResolvedConfig {
  RunConfig config;
  std::string seed_source = "config";
};

ResolvedConfig resolve(const std::string& path, const CommandOptions& options) {
  ResolvedConfig r{parse_run_config(KeyValueFile::load(path))};
  if (options.seed) {
    r.config.set_seed(*options.seed);
    r.seed_source = "flag";
  } else if (const char* env = std::getenv(kSeedEnvVar); env && options.use_env_seed) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
      throw ConfigError("expected an unsigned 64-bit integer", 0, kSeedEnvVar);
    }
    r.config.set_seed(v);
    r.seed_source = std::string("env:") + kSeedEnvVar;
  }
  return r;
}

json manifest(const std::string& command, const json& config, std::uint64_t seed,
              const std::string& seed_source, const std::string& started,
              const std::vector<std::string>& outputs, json summary) {
  return json{{"tool", "ifmsim"},
              {"version", kToolVersion},
              {"command", command},
              {"config", config},
              {"config_hash", config_hash(config)},
              {"master_seed", seed},
              {"seed_source", seed_source},
              {"started_utc", started},
              {"finished_utc", utc_now()},
              {"outputs", outputs},
              {"summary", std::move(summary)}};
}

json noise_to_json(const NoiseModel& model) {
  json j{{"model", noise_model_name(model)}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ZeroSumNoise>) {
          j["theta_max"] = m.theta_max;
          j["phi"] = m.phi;
        } else if constexpr (std::is_same_v<T, WhiteNoise>) {
          j["theta_lo"] = m.theta_lo;
          j["theta_hi"] = m.theta_hi;
          j["phi_lo"] = m.phi_lo;
          j["phi_hi"] = m.phi_hi;
        } else if constexpr (std::is_same_v<T, TelegraphNoise>) {
          j["kappa_inverse"] = m.kappa_inverse;
          j["delta_theta"] = m.delta_theta;
          j["phi"] = m.phi;
        } else {
          j["color"] = std::string(color_name(m.color));
          j["theta"] = m.theta;
        }
      },
      model);
  return j;
}

json points_to_json(const std::vector<GridPoint>& points, std::uint64_t seed) {
  json rows = json::array();
  for (const auto& p : points) {
    rows.push_back({{"N", p.slots},
                    {"param", p.param},
                    {"mean", p.stats.mean},
                    {"variance", p.stats.variance},
                    {"std", p.stats.std},
                    {"R", p.stats.count},
                    {"seed", seed}});
  }
  return rows;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, end);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

json config_to_json(const RunConfig& config) {
  json j{{"mode", run_mode_name(config.mode)}, {"name", config.name}, {"seed", config.seed}};
  switch (config.mode) {
    case RunMode::Sweep:
    case RunMode::KappaSweep: {
      const auto& s = config.sweep;
      j["protocol"] = protocol_name(s.protocol);
      j["noise"] = noise_to_json(s.noise);
      j["N"] = s.n_values;
      j["R"] = s.realizations;
      json timing{{"tau_b", s.timing.tau_b},
                  {"tau_bs", s.timing.tau_bs},
                  {"sample_rate", s.timing.sample_rate}};
      if (s.timing.total_time) timing["total_time"] = *s.timing.total_time;
      j["timing"] = timing;
      if (config.mode == RunMode::KappaSweep) {
        j["kappa_inverse"] = config.kappa_inverse;
        j["noise"].erase("kappa_inverse");
      }
      break;
    }
    case RunMode::Clustering:
      j["N"] = config.clustering.n_values;
      j["R"] = config.clustering.realizations;
      j["kappa_inverse_fraction"] = config.clustering.kappa_inverse_fraction;
      j["theta"] = config.clustering.theta;
      break;
    case RunMode::Fcs:
      j["kappa"] = config.fcs.kappa;
      j["theta"] = config.fcs.theta;
      j["T"] = config.fcs.total_time;
      j["slots"] = config.fcs.slots;
      j["lambda"] = config.fcs.lambdas;
      j["R"] = config.fcs.realizations;
      j["zero_frequency_check"] = config.zero_frequency_check;
      break;
  }
  return j;
}

std::string config_hash(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string stats_csv(const std::vector<GridPoint>& points, std::uint64_t seed) {
  std::ostringstream s;
  s << "N,param,mean,variance,std,R,seed\n";
  for (const auto& p : points) {
    s << p.slots << ',' << format_double(p.param) << ',' << format_double(p.stats.mean) << ','
      << format_double(p.stats.variance) << ',' << format_double(p.stats.std) << ','
      << p.stats.count << ',' << seed << '\n';
  }
  return s.str();
}

int cmd_sweep(const std::string& config_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const std::string started = utc_now();
    const ResolvedConfig resolved = resolve(config_path, options);
    const RunConfig& cfg = resolved.config;
    const json echo = config_to_json(cfg);
    const bool as_json = options.format == OutputFormat::Json;
    OutputDir dir(options.out_dir);
    json summary = json::object();

    const auto emit = [&](const std::string& stem, const std::vector<GridPoint>& points) {
      if (as_json) {
        dir.write(stem + "_results.json",
                  json{{"config", echo}, {"results", points_to_json(points, cfg.seed)}}.dump(2) +
                      "\n");
      } else {
        dir.write(stem + "_stats.csv", stats_csv(points, cfg.seed));
      }
    };

    switch (cfg.mode) {
      case RunMode::Sweep:
        emit(cfg.name, run_sweep(cfg.sweep, options.threads).points);
        break;
      case RunMode::KappaSweep: {
        const auto result = sweep_kappa_n(cfg.sweep, cfg.kappa_inverse, options.threads);
        emit(cfg.name, result.points);
        summary["anomalous_N"] = result.anomalous_slots;
        break;
      }
      case RunMode::Clustering: {
        const auto result = clustering_sweep(cfg.clustering, options.threads);
        emit(cfg.name + "_cifm", result.cifm);
        emit(cfg.name + "_pifm", result.pifm);
        break;
      }
      case RunMode::Fcs:
        throw ConfigError("fcs configs run under the 'fcs' subcommand", 0, "experiment.mode");
    }

    dir.write("manifest.json", manifest("sweep", echo, cfg.seed, resolved.seed_source, started,
                                        dir.written(), summary)
                                       .dump(2) +
                                   "\n");
    for (const auto& f : dir.written()) out << "wrote " << f << '\n';
    return int{kExitOk};
  });
}

int cmd_table1(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = table1();
    OutputDir dir(options.out_dir);
    int passed = 0;
    std::ostringstream csv;
    json j = json::array();
    csv << "configuration,cifm_p0,pifm_p0,cifm_p0_3dp,pifm_p0_3dp,reference_cifm,reference_pifm,"
           "status\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const bool ok = table1_row_matches(r);
      passed += ok ? 1 : 0;
      const char* status = ok ? "PASS" : "FAIL";
      csv << csv_field(r.configuration) << ',' << format_double(r.cifm_p0) << ','
          << format_double(r.pifm_p0) << ',' << fixed3(r.cifm_p0) << ',' << fixed3(r.pifm_p0)
          << ',' << fixed3(r.reference_cifm) << ',' << fixed3(r.reference_pifm) << ',' << status
          << '\n';
      j.push_back({{"configuration", r.configuration},
                   {"cifm_p0", r.cifm_p0},
                   {"pifm_p0", r.pifm_p0},
                   {"reference_cifm", r.reference_cifm},
                   {"reference_pifm", r.reference_pifm},
                   {"status", status}});
      out << status << "  row " << i + 1 << "  (" << r.configuration << ")  cIFM "
          << fixed3(r.cifm_p0) << "  pIFM " << fixed3(r.pifm_p0) << '\n';
    }
    if (options.format == OutputFormat::Json) {
      dir.write("table1.json", j.dump(2) + "\n");
    } else {
      dir.write("table1.csv", csv.str());
    }
    out << passed << "/" << rows.size() << " rows match\n";
    return int{kExitOk};
  });
}

int cmd_fcs(const std::string& config_path, const CommandOptions& options, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const std::string started = utc_now();
    const ResolvedConfig resolved = resolve(config_path, options);
    const RunConfig& cfg = resolved.config;
    if (cfg.mode != RunMode::Fcs) {
      throw ConfigError("the fcs subcommand needs mode = fcs", 0, "experiment.mode");
    }
    const FcsConfig& f = cfg.fcs;
    const json echo = config_to_json(cfg);
    const GFEstimate gf = fcs_estimate(f, options.threads);
    OutputDir dir(options.out_dir);

    double worst_sigma = 0.0;
    std::ostringstream csv;
    json rows = json::array();
    csv << "lambda,re,im,err,re_err,im_err,analytic_re,analytic_im\n";
    for (std::size_t i = 0; i < gf.lambda.size(); ++i) {
      const auto exact = poisson_generating_function(f.kappa, f.total_time, f.theta, gf.lambda[i]);
      const double e = gf.statistical_error(i);
      if (e > 0.0) {
        worst_sigma = std::max(
            worst_sigma, std::abs(std::complex(gf.re[i], gf.im[i]) - exact) / e);
      }
      csv << format_double(gf.lambda[i]) << ',' << format_double(gf.re[i]) << ','
          << format_double(gf.im[i]) << ',' << format_double(e) << ','
          << format_double(gf.re_error[i]) << ',' << format_double(gf.im_error[i]) << ','
          << format_double(exact.real()) << ',' << format_double(exact.imag()) << '\n';
      rows.push_back({{"lambda", gf.lambda[i]},
                      {"re", gf.re[i]},
                      {"im", gf.im[i]},
                      {"err", e},
                      {"analytic_re", exact.real()},
                      {"analytic_im", exact.imag()}});
    }
    if (options.format == OutputFormat::Json) {
      dir.write(cfg.name + "_gf.json", json{{"config", echo}, {"gf", rows}}.dump(2) + "\n");
    } else {
      dir.write(cfg.name + "_gf.csv", csv.str());
    }

    const double mu = f.kappa * f.total_time;
    json report{{"analytic",
                 {{"mean", mu * f.theta},
                  {"second_moment", mu * f.theta * f.theta + std::pow(mu * f.theta, 2)},
                  {"variance", mu * f.theta * f.theta},
                  {"variance_to_mean", 1.0}}},
                {"max_deviation_in_std_errors", worst_sigma}};
    try {
      const FcsMoments m = fcs_moments(gf, f.theta);
      report["measured"] = {{"mean", m.mean},
                            {"second_moment", m.second_moment},
                            {"variance", m.variance},
                            {"count_mean", m.count_mean},
                            {"count_variance", m.count_variance},
                            {"variance_to_mean", m.variance_to_mean},
                            {"variance_to_mean_deviation", m.variance_to_mean - 1.0}};
      out << "variance/mean = " << format_double(m.variance_to_mean) << " (deviation from 1: "
          << format_double(m.variance_to_mean - 1.0) << ")\n";
    } catch (const InvalidArgument& e) {
      report["measured"] = nullptr;
      report["moments_unavailable"] = e.what();
    }
    if (cfg.zero_frequency_check) {
      const auto z = zero_freq_psd_check(f, options.threads);
      report["zero_frequency"] = {{"second_moment_fcs", z.second_moment_fcs},
                                  {"second_moment_psd", z.second_moment_psd},
                                  {"variance_fcs", z.variance_fcs},
                                  {"variance_psd", z.variance_psd},
                                  {"second_moment_rel_error", z.second_moment_rel_error},
                                  {"variance_rel_error", z.variance_rel_error}};
    }
    dir.write(cfg.name + "_moments.json", report.dump(2) + "\n");
    dir.write("manifest.json", manifest("fcs", echo, cfg.seed, resolved.seed_source, started,
                                        dir.written(), json::object())
                                       .dump(2) +
                                   "\n");
    for (const auto& file : dir.written()) out << "wrote " << file << '\n';
    return int{kExitOk};
  });
}

int cmd_noise(const NoiseOptions& noise, const CommandOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    if (noise.color.has_value() == noise.telegraph) {
      throw ConfigError("give exactly one of --color or --telegraph", 0, "");
    }
    if (noise.samples < 64 || noise.samples % 2 != 0) {
      throw ConfigError("must be even and >= 64", 0, "--samples");
    }
    if (noise.traces < 1) throw ConfigError("must be >= 1", 0, "--traces");

    std::optional<NoiseColor> color;
    if (noise.color) {
      color = parse_color(*noise.color);
      if (!color) throw ConfigError("unsupported color '" + *noise.color + "'", 0, "--color");
    } else if (!(noise.kappa > 0.0)) {
      throw ConfigError("telegraph noise needs --kappa > 0", 0, "--kappa");
    }
    const double rate = noise.sample_rate.value_or(color ? 1.0 : 100.0 * noise.kappa);
    if (!(rate > 0.0)) throw ConfigError("must be > 0", 0, "--sample-rate");

    std::vector<std::vector<double>> traces(noise.traces);
    std::size_t padded = 64;
    while (padded < noise.samples) padded <<= 1;
    for (std::size_t t = 0; t < noise.traces; ++t) {
      const std::uint64_t seed = derive_seed(noise.seed, {t});
      if (color) {
        traces[t] = gen_colored(ColorSpec::of(*color), padded, seed);
        traces[t].resize(noise.samples);
      } else {
        const TelegraphSpec spec{noise.kappa, noise.amplitude, rate};
        traces[t] = gen_telegraph(spec, static_cast<double>(noise.samples) / rate, seed);
      }
    }

    std::vector<PsdEstimate> spectra;
    for (const auto& tr : traces) spectra.push_back(estimate_psd(tr, rate, Window::Hann, 1));
    const PsdEstimate psd = average_psd(spectra);

    OutputDir dir(options.out_dir);
    std::ostringstream trace_csv;
    trace_csv << "time_s,value\n";
    for (std::size_t i = 0; i < traces[0].size(); ++i) {
      trace_csv << format_double(static_cast<double>(i) / rate) << ','
                << format_double(traces[0][i]) << '\n';
    }
    dir.write("noise_trace.csv", trace_csv.str());
    std::ostringstream psd_csv;
    psd_csv << "freq_hz,psd_db\n";
    for (std::size_t k = 1; k < psd.psd.size(); ++k) {
      if (psd.psd[k] > 0.0) {
        psd_csv << format_double(psd.freq[k]) << ',' << format_double(10.0 * std::log10(psd.psd[k]))
                << '\n';
      }
    }
    dir.write("noise_psd.csv", psd_csv.str());

    out << "slope_db_per_decade = " << format_double(fit_slope_db_per_decade(psd)) << '\n';
    if (!color) {
      const auto max_lag = static_cast<std::size_t>(
          std::max(1.0, std::round(rate / (2.0 * noise.kappa))));
      std::vector<double> acf(max_lag + 1, 0.0);
      for (const auto& tr : traces) {
        const auto a = estimate_acf(tr, max_lag);
        for (std::size_t k = 0; k <= max_lag; ++k) acf[k] += a[k] / static_cast<double>(traces.size());
      }
      const double kappa_fit = fit_decay_rate(acf, 1.0 / rate, max_lag) / 2.0;
      out << "kappa_fit = " << format_double(kappa_fit) << " (input " << format_double(noise.kappa)
          << ", relative error " << format_double(std::abs(kappa_fit - noise.kappa) / noise.kappa)
          << ")\n";
    }
    for (const auto& f : dir.written()) out << "wrote " << f << '\n';
    return int{kExitOk};
  });
}

}  // namespace ifm
