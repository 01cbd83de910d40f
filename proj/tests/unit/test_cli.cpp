#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ifm/cli.hpp"

using namespace ifm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ifm_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSweepConfig = R"(# small zero-sum run
[experiment]
mode = sweep
name = zero_sum
protocol = cifm
seed = 77

[noise]
model = zero_sum
theta_max = pi

[grid]
N = 2:6
R = 30
)";

}  // namespace

TEST(ParseNumber, Expressions) {
  EXPECT_DOUBLE_EQ(parse_number("pi/6"), kPi / 6);
  EXPECT_DOUBLE_EQ(parse_number(" -pi / 2 "), -kPi / 2);
  EXPECT_DOUBLE_EQ(parse_number("2pi"), 2 * kPi);
  EXPECT_DOUBLE_EQ(parse_number("3*pi/4"), 3 * kPi / 4);
  EXPECT_DOUBLE_EQ(parse_number("1e-5"), 1e-5);
  EXPECT_DOUBLE_EQ(parse_number("-0.25"), -0.25);
  EXPECT_THROW(parse_number("pie"), InvalidArgument);
  EXPECT_THROW(parse_number(""), InvalidArgument);
  EXPECT_THROW(parse_number("1/0"), InvalidArgument);
}

TEST(ParseLists, RangesAndLinspace) {
  EXPECT_EQ(parse_int_list("1:4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_int_list("1, 2, 5, 10"), (std::vector<int>{1, 2, 5, 10}));
  EXPECT_EQ(parse_int_list("1:3:9, 20"), (std::vector<int>{1, 4, 7, 20}));
  EXPECT_THROW(parse_int_list("5:1"), InvalidArgument);
  EXPECT_THROW(parse_int_list("1.5"), InvalidArgument);
  const auto l = parse_real_list("linspace(-1, 1, 41)");
  ASSERT_EQ(l.size(), 41u);
  EXPECT_EQ(l.front(), -1.0);
  EXPECT_EQ(l.back(), 1.0);
  EXPECT_NEAR(l[20], 0.0, 1e-15);
  EXPECT_EQ(parse_real_list("pi, 0.5"), (std::vector<double>{kPi, 0.5}));
  EXPECT_EQ(parse_real_list("-1, linspace(0, 1, 3), 4"), (std::vector<double>{-1, 0, 0.5, 1, 4}));
  EXPECT_THROW(parse_real_list("linspace(0, 1, 3"), InvalidArgument);
  EXPECT_THROW(parse_real_list("linspace(0, 1)"), InvalidArgument);
}

TEST(KeyValueFile, SectionsCommentsAndLines) {
  const auto f = KeyValueFile::parse("top = 1\n[A]\n; note\nKey = x y  # trailing\n");
  EXPECT_EQ(f.raw("top"), "1");
  EXPECT_EQ(f.raw("a.key"), "x y");
  EXPECT_EQ(f.line_of("a.key"), 4);
  try {
    KeyValueFile::parse("[a]\nk = 1\nk = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.key(), "a.k");
  }
  EXPECT_THROW(KeyValueFile::parse("[a\n"), ConfigError);
  EXPECT_THROW(KeyValueFile::parse("novalue\n"), ConfigError);
}

TEST(RunConfig, ParsesSweep) {
  const auto cfg = parse_run_config(KeyValueFile::parse(kSweepConfig));
  EXPECT_EQ(cfg.mode, RunMode::Sweep);
  EXPECT_EQ(cfg.name, "zero_sum");
  EXPECT_EQ(cfg.sweep.master_seed, 77u);
  EXPECT_EQ(cfg.sweep.n_values, (std::vector<int>{2, 3, 4, 5, 6}));
  ASSERT_TRUE(std::holds_alternative<ZeroSumNoise>(cfg.sweep.noise));
  EXPECT_DOUBLE_EQ(std::get<ZeroSumNoise>(cfg.sweep.noise).theta_max, kPi);
}

TEST(RunConfig, MissingAndUnknownKeys) {
  std::string text = kSweepConfig;
  text.replace(text.find("protocol = cifm"), 15, "");
  try {
    parse_run_config(KeyValueFile::parse(text));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "experiment.protocol");
  }
  try {
    parse_run_config(KeyValueFile::parse(std::string(kSweepConfig) + "bogus = 1\n"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "grid.bogus");
    EXPECT_EQ(e.line(), 15);
  }
  try {
    std::string bad = kSweepConfig;
    bad.replace(bad.find("R = 30"), 6, "R = lots");
    parse_run_config(KeyValueFile::parse(bad));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "grid.r");
    EXPECT_EQ(e.line(), 14);
  }
}

TEST(ConfigHash, KeyOrderIndependentAndSemantic) {
  const std::string reordered = R"([grid]
R = 30
N = 2,3,4,5,6
[noise]
theta_max = 3.141592653589793
model = zero_sum
[experiment]
seed = 77
protocol = cifm
name = zero_sum
mode = sweep
)";
  const auto a = config_to_json(parse_run_config(KeyValueFile::parse(kSweepConfig)));
  const auto b = config_to_json(parse_run_config(KeyValueFile::parse(reordered)));
  EXPECT_EQ(config_hash(a), config_hash(b));
  std::string changed = kSweepConfig;
  changed.replace(changed.find("R = 30"), 6, "R = 31");
  const auto c = config_to_json(parse_run_config(KeyValueFile::parse(changed)));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Format, DoublesAndFields) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(std::stod(format_double(kPi)), kPi);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(csv_field("a, b"), "\"a, b\"");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("q\"x"), "\"q\"\"x\"");
}

TEST(CmdSweep, WritesStatsAndManifestDeterministically) {
  TempDir dir;
  write(dir / "zero_sum.cfg", kSweepConfig);
  std::ostringstream out, err;
  CommandOptions opts;
  opts.out_dir = (dir / "a").string();
  opts.use_env_seed = false;
  ASSERT_EQ(cmd_sweep((dir / "zero_sum.cfg").string(), opts, out, err), kExitOk) << err.str();
  const std::string first = read(dir / "a" / "zero_sum_stats.csv");
  EXPECT_EQ(first.substr(0, first.find('\n')), "N,param,mean,variance,std,R,seed");
  EXPECT_TRUE(fs::exists(dir / "a" / "manifest.json"));
  const auto manifest = nlohmann::json::parse(read(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 77u);
  EXPECT_EQ(manifest["seed_source"], "config");
  EXPECT_EQ(manifest["config"]["protocol"], "cifm");

  for (unsigned threads : {1u, 4u, 16u}) {
    opts.threads = threads;
    opts.out_dir = (dir / ("t" + std::to_string(threads))).string();
    ASSERT_EQ(cmd_sweep((dir / "zero_sum.cfg").string(), opts, out, err), kExitOk);
    EXPECT_EQ(read(fs::path(opts.out_dir) / "zero_sum_stats.csv"), first);
  }
}

TEST(CmdSweep, SeedOverrides) {
  TempDir dir;
  write(dir / "zero_sum.cfg", kSweepConfig);
  std::ostringstream out, err;
  CommandOptions opts;
  opts.out_dir = dir.str();
  ::setenv(kSeedEnvVar, "5", 1);
  ASSERT_EQ(cmd_sweep((dir / "zero_sum.cfg").string(), opts, out, err), kExitOk);
  auto manifest = nlohmann::json::parse(read(dir / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 5u);
  EXPECT_EQ(manifest["seed_source"], std::string("env:") + kSeedEnvVar);
  opts.seed = 6;
  ASSERT_EQ(cmd_sweep((dir / "zero_sum.cfg").string(), opts, out, err), kExitOk);
  manifest = nlohmann::json::parse(read(dir / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 6u);
  EXPECT_EQ(manifest["seed_source"], "flag");
  ::setenv(kSeedEnvVar, "not-a-number", 1);
  opts.seed.reset();
  EXPECT_EQ(cmd_sweep((dir / "zero_sum.cfg").string(), opts, out, err), kExitConfig);
  ::unsetenv(kSeedEnvVar);
}

TEST(CmdSweep, ExitCodes) {
  TempDir dir;
  std::string missing = kSweepConfig;
  missing.replace(missing.find("protocol = cifm"), 15, "");
  write(dir / "missing.cfg", missing);
  std::ostringstream out, err;
  CommandOptions opts;
  opts.out_dir = dir.str();
  opts.use_env_seed = false;
  EXPECT_EQ(cmd_sweep((dir / "missing.cfg").string(), opts, out, err), kExitConfig);
  EXPECT_NE(err.str().find("protocol"), std::string::npos);
  EXPECT_EQ(cmd_sweep((dir / "absent.cfg").string(), opts, out, err), kExitConfig);

  std::string runtime = kSweepConfig;
  runtime.replace(runtime.find("N = 2:6"), 7, "N = 1");
  write(dir / "runtime.cfg", runtime);
  err.str("");
  EXPECT_EQ(cmd_sweep((dir / "runtime.cfg").string(), opts, out, err), kExitRuntime);
  EXPECT_NE(err.str().find("N=1"), std::string::npos) << err.str();
}

TEST(CmdSweep, ClusteringAndJson) {
  TempDir dir;
  write(dir / "c.cfg", R"([experiment]
mode = clustering
name = clus
[grid]
N = 4
R = 20
kappa_inverse_fraction = 0.1, 1
)");
  std::ostringstream out, err;
  CommandOptions opts;
  opts.out_dir = dir.str();
  opts.use_env_seed = false;
  opts.format = OutputFormat::Json;
  ASSERT_EQ(cmd_sweep((dir / "c.cfg").string(), opts, out, err), kExitOk) << err.str();
  const auto j = nlohmann::json::parse(read(dir / "clus_pifm_results.json"));
  EXPECT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["config"]["mode"], "clustering");
}

TEST(CmdTable1, WritesCsv) {
  TempDir dir;
  std::ostringstream out, err;
  CommandOptions opts;
  opts.out_dir = dir.str();
  ASSERT_EQ(cmd_table1(opts, out, err), kExitOk);
  std::istringstream csv(read(dir / "table1.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("configuration,cifm_p0,pifm_p0", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 12);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
}

TEST(CmdFcs, GeneratingFunctionAndReport) {
  TempDir dir;
  const auto config = [&](int r) {
    return "[experiment]\nmode = fcs\nname = gf\nseed = 3\n[fcs]\nkappa = 4\ntheta = 0.1\nT = 1\n"
           "lambda = -0.01, 0, 0.01, 2, 4\nR = " +
           std::to_string(r) + "\n";
  };
  write(dir / "a.cfg", config(1000));
  write(dir / "b.cfg", config(4000));
  std::ostringstream out, err;
  CommandOptions opts;
  opts.use_env_seed = false;
  opts.out_dir = (dir / "a").string();
  ASSERT_EQ(cmd_fcs((dir / "a.cfg").string(), opts, out, err), kExitOk) << err.str();
  opts.out_dir = (dir / "b").string();
  ASSERT_EQ(cmd_fcs((dir / "b.cfg").string(), opts, out, err), kExitOk) << err.str();

  const auto rows = [](const std::string& text) {
    std::vector<std::vector<double>> out;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<double> vals;
      std::istringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) vals.push_back(std::stod(cell));
      out.push_back(vals);
    }
    return out;
  };
  const auto a = rows(read(dir / "a" / "gf_gf.csv"));
  const auto b = rows(read(dir / "b" / "gf_gf.csv"));
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[1][0], 0.0);
  EXPECT_EQ(a[1][1], 1.0);
  // Standard error halves when R quadruples.
  for (std::size_t i : {3u, 4u}) EXPECT_NEAR(a[i][3] / b[i][3], 2.0, 0.4);
  const auto report = nlohmann::json::parse(read(dir / "a" / "gf_moments.json"));
  EXPECT_TRUE(report["measured"].contains("variance_to_mean"));
  EXPECT_TRUE(report["measured"].contains("variance_to_mean_deviation"));
}

TEST(CmdNoise, SlopesAndTelegraphFit) {
  TempDir dir;
  CommandOptions opts;
  opts.out_dir = dir.str();
  const auto slope_of = [](const std::string& text) {
    const auto pos = text.find("slope_db_per_decade = ");
    return std::stod(text.substr(pos + 22));
  };
  NoiseOptions pink;
  pink.color = "pink";
  pink.samples = 50000;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_noise(pink, opts, out, err), kExitOk) << err.str();
  EXPECT_NEAR(slope_of(out.str()), -10.0, 1.5);
  EXPECT_EQ(read(dir / "noise_psd.csv").rfind("freq_hz,psd_db\n", 0), 0u);
  EXPECT_EQ(read(dir / "noise_trace.csv").rfind("time_s,value\n", 0), 0u);

  NoiseOptions white;
  white.color = "white";
  out.str("");
  ASSERT_EQ(cmd_noise(white, opts, out, err), kExitOk);
  EXPECT_LT(std::abs(slope_of(out.str())), 1.5);

  NoiseOptions tel;
  tel.telegraph = true;
  tel.kappa = 1e5;
  out.str("");
  ASSERT_EQ(cmd_noise(tel, opts, out, err), kExitOk);
  const auto pos = out.str().find("kappa_fit = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(out.str().substr(pos + 12)), 1e5, 1e4);

  NoiseOptions teal;
  teal.color = "teal";
  EXPECT_EQ(cmd_noise(teal, opts, out, err), kExitConfig);
}
