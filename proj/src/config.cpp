#include "ifm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace ifm {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

// factor := [+-] (number | "pi" | number "pi"); expr := factor (("*"|"/") factor)*
class NumberParser {
 public:
  explicit NumberParser(std::string_view text) : s_(text) {}

  double parse() {
    double v = factor();
    skip();
    while (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
      const char op = s_[pos_++];
      const double rhs = factor();
      v = op == '*' ? v * rhs : v / rhs;
      skip();
    }
    if (pos_ != s_.size()) fail();
    if (!std::isfinite(v)) throw InvalidArgument("non-finite number '" + std::string(s_) + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail() const {
    throw InvalidArgument("cannot parse number '" + std::string(s_) + "'");
  }

  bool take_pi() {
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return true;
    }
    return false;
  }

  double factor() {
    skip();
    double sign = 1.0;
    while (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      if (s_[pos_++] == '-') sign = -sign;
      skip();
    }
    if (take_pi()) return sign * std::numbers::pi;
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc{}) fail();
    pos_ += static_cast<std::size_t>(end - begin);
    if (take_pi()) v *= std::numbers::pi;
    return sign * v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

class Reader {
 public:
  explicit Reader(const KeyValueFile& file) : file_(file) {}

  bool has(const std::string& key) {
    allowed_.insert(key);
    return file_.has(key);
  }

  template <class F>
  auto convert(const std::string& key, F&& f) -> decltype(f(std::string{})) {
    try {
      return f(file_.raw(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), file_.line_of(key), key);
    }
  }

  const std::string& require(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required key", 0, key);
    return file_.raw(key);
  }

  double real(const std::string& key) {
    require(key);
    return convert(key, parse_number);
  }
  double real(const std::string& key, double fallback) {
    return has(key) ? real(key) : fallback;
  }
  std::int64_t integer(const std::string& key) {
    const double v = real(key);
    if (v != std::floor(v)) throw ConfigError("expected an integer", file_.line_of(key), key);
    return static_cast<std::int64_t>(v);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }
  std::string text(const std::string& key) { return require(key); }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? file_.raw(key) : fallback;
  }
  std::vector<double> reals(const std::string& key) {
    require(key);
    return convert(key, parse_real_list);
  }
  std::vector<int> ints(const std::string& key) {
    require(key);
    return convert(key, parse_int_list);
  }
  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    return convert(key, [](const std::string& s) {
      std::uint64_t v = 0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || end != s.data() + s.size()) {
        throw InvalidArgument("expected an unsigned 64-bit integer");
      }
      return v;
    });
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = lower(file_.raw(key));
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("expected a boolean", file_.line_of(key), key);
  }

  [[noreturn]] void bad_value(const std::string& key, const std::string& what) {
    throw ConfigError(what, file_.line_of(key), key);
  }

  void reject_unknown() const {
    for (const auto& key : file_.keys()) {
      if (!allowed_.contains(key)) throw ConfigError("unknown key", file_.line_of(key), key);
    }
  }

 private:
  const KeyValueFile& file_;
  std::set<std::string> allowed_;
};

Protocol read_protocol(Reader& in) {
  const std::string v = lower(in.text("experiment.protocol"));
  if (v == "qubit") return Protocol::Qubit;
  if (v == "cifm") return Protocol::Cifm;
  if (v == "pifm") return Protocol::Pifm;
  in.bad_value("experiment.protocol", "expected qubit, cifm or pifm");
}

NoiseModel read_noise(Reader& in, bool kappa_grid) {
  constexpr double kAxis = -std::numbers::pi / 2.0;
  const std::string model = lower(in.text("noise.model"));
  if (model == "zero_sum") {
    return ZeroSumNoise{in.real("noise.theta_max"), in.real("noise.phi", kAxis)};
  }
  if (model == "white") {
    WhiteNoise w;
    w.theta_lo = in.real("noise.theta_lo");
    w.theta_hi = in.real("noise.theta_hi");
    w.phi_lo = in.real("noise.phi_lo", kAxis);
    w.phi_hi = in.real("noise.phi_hi", kAxis);
    return w;
  }
  if (model == "telegraph") {
    TelegraphNoise t;
    if (!kappa_grid) t.kappa_inverse = in.real("noise.kappa_inverse");
    t.delta_theta = in.real("noise.delta_theta");
    t.phi = in.real("noise.phi", kAxis);
    return t;
  }
  if (model == "colored_phase") {
    const std::string name = in.text("noise.color");
    const auto color = parse_color(lower(name));
    if (!color) in.bad_value("noise.color", "unsupported color '" + name + "'");
    return ColoredPhaseNoise{*color, in.real("noise.theta")};
  }
  in.bad_value("noise.model", "expected zero_sum, white, telegraph or colored_phase");
}

TimingTemplate read_timing(Reader& in) {
  TimingTemplate t;
  t.tau_b = in.real("timing.tau_b", 1.0);
  t.tau_bs = in.real("timing.tau_bs", 0.0);
  t.sample_rate = in.real("timing.sample_rate", 1.0);
  if (in.has("timing.total_time")) t.total_time = in.real("timing.total_time");
  return t;
}

std::size_t read_count(Reader& in, const std::string& key, std::int64_t minimum) {
  const std::int64_t v = in.integer(key);
  if (v < minimum) in.bad_value(key, "must be >= " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line, std::string key)
    : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
            (key.empty() ? std::string() : "key '" + key + "': ") + what),
      line_(line),
      key_(std::move(key)) {}

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile file;
  std::istringstream in(text);
  std::string raw_line;
  std::string section;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const auto comment = raw_line.find_first_of("#;");
    const std::string content = trim(std::string_view(raw_line).substr(0, comment));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']' || content.size() < 3) {
        throw ConfigError("malformed section header", line, "");
      }
      section = lower(trim(content.substr(1, content.size() - 2)));
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, "");
    const std::string name = lower(trim(content.substr(0, eq)));
    const std::string value = trim(content.substr(eq + 1));
    if (name.empty()) throw ConfigError("empty key", line, "");
    const std::string key = section.empty() ? name : section + "." + name;
    if (value.empty()) throw ConfigError("empty value", line, key);
    if (file.entries_.contains(key)) throw ConfigError("duplicate key", line, key);
    file.entries_.emplace(key, Entry{value, line});
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", 0, "");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

const std::string& KeyValueFile::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key", 0, key);
  return it->second.value;
}

int KeyValueFile::line_of(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::vector<std::string> KeyValueFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

double parse_number(const std::string& text) { return NumberParser(trim(text)).parse(); }

namespace {

std::vector<double> linspace_item(const std::string& t) {
  const auto args = split(t.substr(9, t.size() - 10), ',');
  if (args.size() != 3) throw InvalidArgument("linspace takes (start, stop, count)");
  const double lo = parse_number(args[0]);
  const double hi = parse_number(args[1]);
  const double count = parse_number(args[2]);
  if (count < 1 || count != std::floor(count)) {
    throw InvalidArgument("linspace count must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = hi;
  return out;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  // Split on commas outside parentheses; each item is a number or linspace(...).
  std::vector<std::string> items(1);
  int depth = 0;
  for (char c : trim(text)) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) throw InvalidArgument("unbalanced ')' in list");
    if (c == ',' && depth == 0) {
      items.emplace_back();
    } else {
      items.back() += c;
    }
  }
  if (depth != 0) throw InvalidArgument("unbalanced '(' in list");
  std::vector<double> out;
  for (const auto& raw : items) {
    const std::string item = trim(raw);
    if (item.rfind("linspace(", 0) == 0 && item.back() == ')') {
      const auto part = linspace_item(item);
      out.insert(out.end(), part.begin(), part.end());
    } else {
      out.push_back(parse_number(item));
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  const auto as_int = [](const std::string& s) {
    const double v = parse_number(s);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("expected integer '" + s + "'");
    return static_cast<int>(v);
  };
  std::vector<int> out;
  for (const auto& item : split(trim(text), ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(as_int(item));
    } else if (range.size() == 2 || range.size() == 3) {
      const int lo = as_int(range[0]);
      const int step = range.size() == 3 ? as_int(range[1]) : 1;
      const int hi = as_int(range.back());
      if (step <= 0 || hi < lo) throw InvalidArgument("bad range '" + item + "'");
      for (int v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      throw InvalidArgument("bad range '" + item + "'");
    }
  }
  return out;
}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Sweep: return "sweep";
    case RunMode::KappaSweep: return "kappa_sweep";
    case RunMode::Clustering: return "clustering";
    case RunMode::Fcs: return "fcs";
  }
  return "?";
}

void RunConfig::set_seed(std::uint64_t value) {
  seed = value;
  sweep.master_seed = value;
  clustering.master_seed = value;
  fcs.seed = value;
}

RunConfig parse_run_config(const KeyValueFile& file) {
  Reader in(file);
  RunConfig cfg;
  const std::string mode = lower(in.text("experiment.mode"));
  if (mode == "sweep") {
    cfg.mode = RunMode::Sweep;
  } else if (mode == "kappa_sweep") {
    cfg.mode = RunMode::KappaSweep;
  } else if (mode == "clustering") {
    cfg.mode = RunMode::Clustering;
  } else if (mode == "fcs") {
    cfg.mode = RunMode::Fcs;
  } else {
    in.bad_value("experiment.mode", "expected sweep, kappa_sweep, clustering or fcs");
  }
  cfg.name = in.text("experiment.name", cfg.name);
  for (char c : cfg.name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      in.bad_value("experiment.name", "name may only hold letters, digits, '_' and '-'");
    }
  }
  const std::uint64_t seed = in.unsigned64("experiment.seed", 0);

  switch (cfg.mode) {
    case RunMode::Sweep:
    case RunMode::KappaSweep: {
      const bool kappa = cfg.mode == RunMode::KappaSweep;
      cfg.sweep.protocol = read_protocol(in);
      cfg.sweep.noise = read_noise(in, kappa);
      cfg.sweep.n_values = in.ints("grid.n");
      cfg.sweep.realizations = read_count(in, "grid.r", 1);
      cfg.sweep.timing = read_timing(in);
      if (kappa) {
        if (!std::holds_alternative<TelegraphNoise>(cfg.sweep.noise)) {
          in.bad_value("noise.model", "kappa_sweep requires telegraph noise");
        }
        cfg.kappa_inverse = in.reals("grid.kappa_inverse");
      }
      break;
    }
    case RunMode::Clustering:
      cfg.clustering.n_values = in.ints("grid.n");
      cfg.clustering.realizations = read_count(in, "grid.r", 1);
      cfg.clustering.kappa_inverse_fraction = in.reals("grid.kappa_inverse_fraction");
      cfg.clustering.theta = in.real("grid.theta", cfg.clustering.theta);
      break;
    case RunMode::Fcs:
      cfg.fcs.kappa = in.real("fcs.kappa");
      cfg.fcs.theta = in.real("fcs.theta");
      cfg.fcs.total_time = in.real("fcs.t");
      cfg.fcs.slots = static_cast<int>(in.integer("fcs.slots", cfg.fcs.slots));
      cfg.fcs.lambdas = in.reals("fcs.lambda");
      cfg.fcs.realizations = read_count(in, "fcs.r", 1);
      cfg.zero_frequency_check = in.boolean("fcs.zero_frequency_check", false);
      break;
  }
  cfg.set_seed(seed);
  in.reject_unknown();
  return cfg;
}

}  // namespace ifm
