#include "ifm/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace ifm {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t samples_for(double sample_rate, double duration) {
  return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

// Ordinary least squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

std::size_t NoiseTrace::expected_length() const { return samples_for(sample_rate, duration); }

void NoiseTrace::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("NoiseTrace: sample_rate must be > 0");
  const std::size_t n = expected_length();
  if (zeta.size() != n || chi.size() != n) {
    throw InvalidArgument("NoiseTrace: series length must equal round(sample_rate*duration) = " +
                          std::to_string(n));
  }
}

void ProtocolTiming::validate() const {
  if (slots < 1) throw InvalidArgument("ProtocolTiming: N must be >= 1");
  if (!(tau_b > 0.0)) throw InvalidArgument("ProtocolTiming: tau_B must be > 0");
  if (!(tau_bs >= 0.0)) throw InvalidArgument("ProtocolTiming: tau_bs must be >= 0");
}

std::optional<std::string> ProtocolTiming::warning() const {
  if (tau_bs > tau_b / 5.0) {
    return "tau_bs exceeds tau_B/5; beam splitters are not short compared to B pulses";
  }
  return std::nullopt;
}

ColorSpec ColorSpec::of(NoiseColor color) {
  switch (color) {
    case NoiseColor::Purple: return {-2.0};
    case NoiseColor::Blue: return {-1.0};
    case NoiseColor::White: return {0.0};
    case NoiseColor::Pink: return {1.0};
    case NoiseColor::Brown: return {2.0};
  }
  return {0.0};
}

std::optional<NoiseColor> parse_color(std::string_view name) {
  if (name == "purple" || name == "violet") return NoiseColor::Purple;
  if (name == "blue") return NoiseColor::Blue;
  if (name == "white") return NoiseColor::White;
  if (name == "pink") return NoiseColor::Pink;
  if (name == "brown" || name == "red") return NoiseColor::Brown;
  return std::nullopt;
}

std::string_view color_name(NoiseColor color) {
  switch (color) {
    case NoiseColor::Purple: return "purple";
    case NoiseColor::Blue: return "blue";
    case NoiseColor::White: return "white";
    case NoiseColor::Pink: return "pink";
    case NoiseColor::Brown: return "brown";
  }
  return "white";
}

void PulseSchedule::validate() const {
  timing.validate();
  if (pulses.size() != static_cast<std::size_t>(timing.slots)) {
    throw InvalidArgument("PulseSchedule: " + std::to_string(pulses.size()) +
                          " pulses for N = " + std::to_string(timing.slots));
  }
  for (const auto& p : pulses) {
    if (p.segments.empty()) throw InvalidArgument("PulseSchedule: pulse without segments");
  }
}

std::vector<double> gen_white(double lo, double hi, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("gen_white: count must be > 0");
  if (!(lo <= hi)) throw InvalidArgument("gen_white: range_lo must be <= range_hi");
  std::vector<double> out(count, lo);
  if (lo == hi) return out;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.5 * (lo + hi), (hi - lo) / 6.0);
  for (double& v : out) v = std::clamp(normal(rng), lo, hi);
  return out;
}

std::vector<double> gen_zero_sum(double theta_max, int count, std::uint64_t seed) {
  if (count < 2) throw InvalidArgument("gen_zero_sum: N must be >= 2");
  if (!(theta_max >= 0.0)) throw InvalidArgument("gen_zero_sum: theta_max must be >= 0");
  const auto pairs = static_cast<std::size_t>(count / 2);
  const std::vector<double> mags = gen_white(0.0, theta_max, pairs, derive_seed(seed, {1}));
  std::vector<double> out;
  out.reserve(count);
  for (double m : mags) {
    out.push_back(m);
    out.push_back(-m);
  }
  if (count % 2 == 1) out.push_back(0.0);
  Rng rng(derive_seed(seed, {2}));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<double> poisson_switch_times(double kappa, double duration, Rng& rng) {
  std::vector<double> times;
  std::exponential_distribution<double> wait(kappa);
  for (double t = wait(rng); t < duration; t += wait(rng)) times.push_back(t);
  return times;
}

std::vector<double> gen_telegraph(const TelegraphSpec& spec, double duration,
                                  std::uint64_t seed) {
  if (!(duration > 0.0)) throw InvalidArgument("gen_telegraph: duration must be > 0");
  if (!(spec.kappa > 0.0)) throw InvalidArgument("gen_telegraph: kappa must be > 0");
  if (!(spec.sample_rate > 0.0)) throw InvalidArgument("gen_telegraph: sample_rate must be > 0");
  Rng rng(seed);
  double level = std::bernoulli_distribution(0.5)(rng) ? spec.amplitude : -spec.amplitude;
  const std::vector<double> switches = poisson_switch_times(spec.kappa, duration, rng);

  const std::size_t n = samples_for(spec.sample_rate, duration);
  std::vector<double> out(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate;
    while (next < switches.size() && switches[next] <= t) {
      level = -level;
      ++next;
    }
    out[i] = level;
  }
  return out;
}

namespace {

void check_alpha(double alpha) {
  if (alpha != -2.0 && alpha != -1.0 && alpha != 0.0 && alpha != 1.0 && alpha != 2.0) {
    throw InvalidArgument("gen_colored: unsupported spectral exponent " + std::to_string(alpha));
  }
}

// White Gaussian spectrum scaled by |f|^{-alpha/2} with the DC bin removed,
// then rescaled to zero mean and unit variance.
std::vector<double> shape_white(double alpha, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> time(count);
  for (auto& v : time) v = normal(rng);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec_bins;
  fft.fwd(spec_bins, time);
  spec_bins[0] = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double f = static_cast<double>(std::min(k, count - k));
    spec_bins[k] *= std::pow(f, -alpha / 2.0);
  }
  fft.inv(time, spec_bins);

  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = time[i].real();
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / count;
  double var = 0.0;
  for (double& v : out) {
    v -= mean;
    var += v * v;
  }
  const double scale = 1.0 / std::sqrt(var / count);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace

std::vector<double> gen_colored(const ColorSpec& spec, std::size_t count, std::uint64_t seed) {
  check_alpha(spec.alpha);
  if (count < 64 || !is_power_of_two(count)) {
    throw InvalidArgument("gen_colored: count must be a power of two >= 64");
  }
  return shape_white(spec.alpha, count, seed);
}

std::vector<double> gen_colored_exact(const ColorSpec& spec, std::size_t count,
                                      std::uint64_t seed) {
  check_alpha(spec.alpha);
  if (count == 0) throw InvalidArgument("gen_colored_exact: count must be >= 1");
  if (count == 1) {
    Rng rng(seed);
    return {std::normal_distribution<double>(0.0, 1.0)(rng)};
  }
  return shape_white(spec.alpha, count, seed);
}

std::vector<double> estimate_acf(std::span<const double> series, std::size_t max_lag) {
  if (series.empty()) throw InvalidArgument("estimate_acf: empty series");
  if (max_lag >= series.size()) throw InvalidArgument("estimate_acf: max_lag must be < length");
  const std::size_t n = series.size();
  std::vector<double> acf(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) sum += series[i] * series[i + k];
    acf[k] = sum / static_cast<double>(n);
  }
  return acf;
}

double PsdEstimate::two_sided(std::size_t k) const {
  const std::size_t last = psd.size() - 1;
  return (k == 0 || k == last) ? psd[k] : 0.5 * psd[k];
}

PsdEstimate estimate_psd(std::span<const double> series, double sample_rate, Window window,
                         std::size_t segments) {
  if (!(sample_rate > 0.0)) throw InvalidArgument("estimate_psd: sample_rate must be > 0");
  if (segments == 0 || series.size() % segments != 0) {
    throw InvalidArgument("estimate_psd: length not divisible into segments");
  }
  const std::size_t len = series.size() / segments;
  if (len < 2 || len % 2 != 0) {
    throw InvalidArgument("estimate_psd: segment length must be even and >= 2");
  }

  std::vector<double> w(len, 1.0);
  if (window == Window::Hann) {
    for (std::size_t i = 0; i < len; ++i) {
      w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / len));
    }
  }
  double w2 = 0.0;
  for (double v : w) w2 += v * v;

  const std::size_t half = len / 2;
  PsdEstimate out;
  out.freq.resize(half + 1);
  out.psd.assign(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) out.freq[k] = k * sample_rate / len;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> buf(len);
  std::vector<std::complex<double>> bins;
  const double norm = 1.0 / (sample_rate * w2 * static_cast<double>(segments));
  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t i = 0; i < len; ++i) buf[i] = series[s * len + i] * w[i];
    fft.fwd(bins, buf);
    for (std::size_t k = 0; k <= half; ++k) {
      const double factor = (k == 0 || k == half) ? 1.0 : 2.0;
      out.psd[k] += factor * std::norm(bins[k]) * norm;
    }
  }
  return out;
}

PsdEstimate average_psd(std::span<const PsdEstimate> estimates) {
  if (estimates.empty()) throw InvalidArgument("average_psd: no estimates");
  PsdEstimate out = estimates.front();
  for (std::size_t e = 1; e < estimates.size(); ++e) {
    if (estimates[e].psd.size() != out.psd.size()) {
      throw InvalidArgument("average_psd: mismatched frequency grids");
    }
    for (std::size_t k = 0; k < out.psd.size(); ++k) out.psd[k] += estimates[e].psd[k];
  }
  for (double& v : out.psd) v /= static_cast<double>(estimates.size());
  return out;
}

double fit_slope_db_per_decade(const PsdEstimate& estimate) {
  const std::size_t n = estimate.psd.size();
  if (n < 4) throw InvalidArgument("fit_slope_db_per_decade: spectrum too short");
  const double lo = std::log10(estimate.freq[1]);
  const double hi = std::log10(estimate.freq[n - 2]);
  double from = lo;
  double to = hi;
  if (hi - lo > 1.0) {
    const double mid = 0.5 * (lo + hi);
    from = mid - 0.5;
    to = mid + 0.5;
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double lf = std::log10(estimate.freq[k]);
    if (lf < from || lf > to || !(estimate.psd[k] > 0.0)) continue;
    x.push_back(lf);
    y.push_back(10.0 * std::log10(estimate.psd[k]));
  }
  if (x.size() < 2) throw InvalidArgument("fit_slope_db_per_decade: too few bins");
  return ols_slope(x, y);
}

double fit_decay_rate(std::span<const double> acf, double dt, std::size_t max_lag) {
  if (acf.empty() || !(acf[0] > 0.0)) throw InvalidArgument("fit_decay_rate: R(0) must be > 0");
  std::vector<double> x{0.0};
  std::vector<double> y{0.0};
  for (std::size_t k = 1; k <= max_lag && k < acf.size(); ++k) {
    if (!(acf[k] > 0.0)) break;
    x.push_back(k * dt);
    y.push_back(std::log(acf[k] / acf[0]));
  }
  if (x.size() < 2) throw InvalidArgument("fit_decay_rate: no positive lags to fit");
  return -ols_slope(x, y);
}

std::size_t first_sample_at(double t, double sample_rate) {
  const double x = t * sample_rate;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::size_t>(std::max(0.0, r));
  }
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x)));
}

PulseSchedule trace_to_schedule(const NoiseTrace& trace, const ProtocolTiming& timing) {
  trace.validate();
  timing.validate();
  const double span = timing.sensing_span();
  if (first_sample_at(trace.duration, trace.sample_rate) <
      first_sample_at(span, trace.sample_rate)) {
    throw InvalidArgument("trace_to_schedule: trace shorter than the sensing span");
  }
  PulseSchedule schedule;
  schedule.timing = timing;
  schedule.pulses.resize(timing.slots);
  const double dt = 1.0 / trace.sample_rate;
  for (int j = 1; j <= timing.slots; ++j) {
    const double start = timing.window_start(j);
    const std::size_t first = first_sample_at(start, trace.sample_rate);
    const std::size_t last =
        std::min(first_sample_at(start + timing.tau_b, trace.sample_rate), trace.zeta.size());
    if (first >= last) {
      throw InvalidArgument("trace_to_schedule: no noise samples in window " +
                            std::to_string(j));
    }
    auto& segments = schedule.pulses[j - 1].segments;
    segments.reserve(last - first);
    for (std::size_t i = first; i < last; ++i) {
      segments.push_back({trace.zeta[i] * dt, trace.chi[i]});
    }
  }
  return schedule;
}

NoiseTrace piecewise_trace(const ProtocolTiming& timing, double sample_rate,
                           std::span<const double> thetas, std::span<const double> phis) {
  timing.validate();
  if (thetas.size() != static_cast<std::size_t>(timing.slots) || phis.size() != thetas.size()) {
    throw InvalidArgument("piecewise_trace: need one angle and one axis per window");
  }
  NoiseTrace trace;
  trace.sample_rate = sample_rate;
  trace.duration = timing.sensing_span();
  const std::size_t n = trace.expected_length();
  trace.zeta.assign(n, 0.0);
  trace.chi.assign(n, 0.0);
  for (int j = 1; j <= timing.slots; ++j) {
    const double start = timing.window_start(j);
    const std::size_t first = first_sample_at(start, sample_rate);
    const std::size_t last = std::min(first_sample_at(start + timing.tau_b, sample_rate), n);
    for (std::size_t i = first; i < last; ++i) {
      trace.zeta[i] = thetas[j - 1] / timing.tau_b;
      trace.chi[i] = phis[j - 1];
    }
  }
  return trace;
}

PulseSchedule schedule_from_angles(std::span<const double> thetas,
                                   std::span<const double> phis) {
  if (thetas.empty() || phis.size() != thetas.size()) {
    throw InvalidArgument("schedule_from_angles: need matching, nonempty angle lists");
  }
  PulseSchedule schedule;
  schedule.timing = {static_cast<int>(thetas.size()), 1.0, 0.0};
  schedule.pulses.reserve(thetas.size());
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    schedule.pulses.push_back(PulseSpec{{{thetas[j], phis[j]}}});
  }
  return schedule;
}

PulseSchedule schedule_from_angles(std::span<const double> thetas, double phi) {
  const std::vector<double> phis(thetas.size(), phi);
  return schedule_from_angles(thetas, phis);
}

}  // namespace ifm
