// noise.hpp - noise generators, trace slicing into pulse schedules, and the
// ACF/PSD estimators used to verify them.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifm/pulses.hpp"
#include "ifm/rng.hpp"

namespace ifm {

/// Uniformly sampled amplitude noise zeta (rad/s) and phase noise chi (rad).
struct NoiseTrace {
  double sample_rate = 1.0;
  double duration = 0.0;
  std::vector<double> zeta;
  std::vector<double> chi;

  std::size_t expected_length() const;
  /// Throws InvalidArgument if the invariants do not hold.
  void validate() const;
};

/// N pulse windows of length tau_b separated by beam splitters of length tau_bs.
struct ProtocolTiming {
  int slots = 1;
  double tau_b = 1.0;
  double tau_bs = 0.0;

  /// Total protocol time (N+1)(tau_b + tau_bs).
  double total_time() const { return (slots + 1) * (tau_b + tau_bs); }
  /// End of the last B window, N(tau_b + tau_bs).
  double sensing_span() const { return slots * (tau_b + tau_bs); }
  /// Start of window j (1-based): j tau_bs + (j-1) tau_b.
  double window_start(int j) const { return j * tau_bs + (j - 1) * tau_b; }

  void validate() const;
  /// Set when tau_bs > tau_b / 5, i.e. instantaneous beam splitters are a poor model.
  std::optional<std::string> warning() const;
};

struct TelegraphSpec {
  double kappa = 1.0;      // switching rate, Hz
  double amplitude = 1.0;  // +/- level
  double sample_rate = 1.0;
};

enum class NoiseColor { Purple, Blue, White, Pink, Brown };

/// PSD is proportional to f^{-alpha}; alpha in {-2,-1,0,1,2}.
struct ColorSpec {
  double alpha = 0.0;

  static ColorSpec of(NoiseColor color);
};

std::optional<NoiseColor> parse_color(std::string_view name);
std::string_view color_name(NoiseColor color);

struct PulseSchedule {
  std::vector<PulseSpec> pulses;
  ProtocolTiming timing;

  void validate() const;
};

/// i.i.d. Gaussian samples with mean (lo+hi)/2 and sigma (hi-lo)/6, clamped to [lo, hi].
std::vector<double> gen_white(double lo, double hi, std::size_t count, std::uint64_t seed);

/// N angles with magnitudes from gen_white(0, theta_max) arranged in +/- pairs
/// (plus one zero for odd N) in shuffled order; the sum is zero.
std::vector<double> gen_zero_sum(double theta_max, int count, std::uint64_t seed);

/// Switching times of a Poisson process of rate kappa on [0, duration).
std::vector<double> poisson_switch_times(double kappa, double duration, Rng& rng);

/// Random telegraph signal sampled at spec.sample_rate for round(rate*duration) samples.
std::vector<double> gen_telegraph(const TelegraphSpec& spec, double duration,
                                  std::uint64_t seed);

/// Zero-mean, unit-variance series with PSD ~ f^{-alpha}, by spectral shaping of
/// white Gaussian noise. count must be a power of two and >= 64.
std::vector<double> gen_colored(const ColorSpec& spec, std::size_t count, std::uint64_t seed);

/// Same shaping at any length, for short per-pulse series. A single sample is
/// plain unit Gaussian; otherwise zero mean and unit variance.
std::vector<double> gen_colored_exact(const ColorSpec& spec, std::size_t count,
                                      std::uint64_t seed);

/// Biased ACF estimate R(k) = (1/n) sum_{i<n-k} x_i x_{i+k}, k = 0..max_lag.
std::vector<double> estimate_acf(std::span<const double> series, std::size_t max_lag);

enum class Window { Rectangular, Hann };

/// One-sided PSD: psd[k] at freq[k] = k fs / L for k = 0..L/2. Bins other than
/// DC and Nyquist carry twice the two-sided density.
struct PsdEstimate {
  std::vector<double> freq;
  std::vector<double> psd;

  double bin_width() const { return freq.size() > 1 ? freq[1] - freq[0] : 0.0; }
  /// Two-sided density at bin k.
  double two_sided(std::size_t k) const;
};

/// Averaged periodogram over `segments` equal, non-overlapping segments.
PsdEstimate estimate_psd(std::span<const double> series, double sample_rate, Window window,
                         std::size_t segments);

/// Averages PSD estimates bin by bin (all inputs must share the frequency grid).
PsdEstimate average_psd(std::span<const PsdEstimate> estimates);

/// Least-squares slope of 10 log10(psd) against log10(f) over the central
/// decade of the spectrum (DC and Nyquist excluded), in dB/decade.
double fit_slope_db_per_decade(const PsdEstimate& estimate);

/// Fits ln R(k) = ln R(0) - rate * k dt over lags 1..max_lag (where R > 0)
/// and returns the decay rate (1/s).
double fit_decay_rate(std::span<const double> acf, double dt, std::size_t max_lag);

/// Slices a trace into per-window pulses. Sample p of window j becomes the
/// segment (zeta_p / sample_rate, chi_p); samples outside B windows are dropped.
PulseSchedule trace_to_schedule(const NoiseTrace& trace, const ProtocolTiming& timing);

/// Trace over the sensing span whose zeta is constant within each window
/// (theta_j / tau_b) and zero elsewhere; chi likewise per window.
NoiseTrace piecewise_trace(const ProtocolTiming& timing, double sample_rate,
                           std::span<const double> thetas, std::span<const double> phis);

/// One segment per pulse (the P = 1 regime) with unit tau_b and no beam-splitter time.
PulseSchedule schedule_from_angles(std::span<const double> thetas,
                                   std::span<const double> phis);

/// Same as above with every axis at phi.
PulseSchedule schedule_from_angles(std::span<const double> thetas, double phi);

/// Index of the first sample at or after time t, tolerant to rounding in t*fs.
std::size_t first_sample_at(double t, double sample_rate);

}  // namespace ifm
