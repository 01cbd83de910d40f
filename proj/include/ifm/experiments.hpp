// experiments.hpp - Monte Carlo ensembles over noise realizations, the N = 4
// configuration table, and full-counting-statistics extraction with the qubit.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ifm/noise.hpp"
#include "ifm/protocols.hpp"

namespace ifm {

// ---------------------------------------------------------------------------
// Noise models
// ---------------------------------------------------------------------------

/// Amplitude noise with a fixed axis and sum over the N windows equal to zero.
struct ZeroSumNoise {
  double theta_max = 0.0;
  double phi = -1.5707963267948966;
};

/// White amplitude and phase noise, drawn per sample. A sample value theta
/// sets zeta = theta / tau_B, so a window held at theta rotates by theta.
/// Equal bounds make the corresponding quantity constant.
struct WhiteNoise {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double phi_lo = -1.5707963267948966;
  double phi_hi = -1.5707963267948966;
};

/// Binary +/-delta_theta amplitude noise per sample, switching at rate 1/kappa_inverse.
struct TelegraphNoise {
  double kappa_inverse = 1.0;
  double delta_theta = 0.0;
  double phi = -1.5707963267948966;
};

/// Constant rotation theta per window. The phase is pi times a unit-variance
/// colored series the length of the trace, wrapped into [-pi, pi].
struct ColoredPhaseNoise {
  NoiseColor color = NoiseColor::White;
  double theta = 0.0;
};

using NoiseModel = std::variant<ZeroSumNoise, WhiteNoise, TelegraphNoise, ColoredPhaseNoise>;

const char* noise_model_name(const NoiseModel& model);

/// Window layout as a function of N. With total_time set, tau_B = total_time / N.
struct TimingTemplate {
  double tau_b = 1.0;
  double tau_bs = 0.0;
  double sample_rate = 1.0;
  std::optional<double> total_time;

  ProtocolTiming for_slots(int slots) const;
};

/// One noise realization over the sensing span of `timing`.
NoiseTrace make_trace(const NoiseModel& model, const ProtocolTiming& timing, double sample_rate,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

struct EnsembleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (R-1) estimator; 0 for a single sample
  double std = 0.0;
  std::size_t count = 0;

  double std_error() const;
  /// Two-pass statistics in index order, independent of how samples were produced.
  static EnsembleStats of(std::span<const double> samples);
};

struct GridPoint {
  int slots = 0;
  double param = 0.0;
  EnsembleStats stats;
};

struct SweepConfig {
  Protocol protocol = Protocol::Cifm;
  NoiseModel noise = WhiteNoise{};
  std::vector<int> n_values;
  std::size_t realizations = 1;
  std::uint64_t master_seed = 0;
  TimingTemplate timing;

  void validate() const;
};

struct SweepResult {
  std::vector<GridPoint> points;
};

/// Marker statistics for every N in config.n_values. Results depend only on
/// the config, never on `threads`.
SweepResult run_sweep(const SweepConfig& config, unsigned threads = 0);

struct KappaSweepResult {
  std::vector<GridPoint> points;  // param = kappa^-1, N-major order
  std::vector<int> anomalous_slots;
};

/// Telegraph-noise grid over (N, kappa^-1). N is flagged anomalous when the
/// extreme window angle delta_theta * P is an integer multiple of 4 pi.
KappaSweepResult sweep_kappa_n(const SweepConfig& config, std::span<const double> kappa_inverse,
                               unsigned threads = 0);

struct ClusteringConfig {
  std::vector<int> n_values;
  std::vector<double> kappa_inverse_fraction;  // of T = N tau_B
  std::size_t realizations = 2000;
  std::uint64_t master_seed = 0;
  double theta = 3.141592653589793;
};

struct ClusteringResult {
  std::vector<GridPoint> cifm;  // param = kappa^-1 / T
  std::vector<GridPoint> pifm;
};

/// One +/-theta sample per window (P = 1); cIFM and pIFM see identical noise.
ClusteringResult clustering_sweep(const ClusteringConfig& config, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Table of two-pi-pulse configurations at N = 4
// ---------------------------------------------------------------------------

struct Table1Row {
  std::string configuration;
  std::vector<double> thetas;
  double cifm_p0 = 0.0;
  double pifm_p0 = 0.0;
  double reference_cifm = 0.0;
  double reference_pifm = 0.0;
};

std::vector<Table1Row> table1();

/// Rounds to 3 decimals and compares with the reference values.
bool table1_row_matches(const Table1Row& row);

// ---------------------------------------------------------------------------
// Full counting statistics
// ---------------------------------------------------------------------------

struct FcsConfig {
  double kappa = 1.0;
  double theta = 0.1;
  double total_time = 1.0;
  int slots = 100;
  std::vector<double> lambdas;
  std::size_t realizations = 1000;
  std::uint64_t seed = 0;
};

struct GFEstimate {
  std::vector<double> lambda;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> re_error;
  std::vector<double> im_error;

  /// Standard error of the complex estimate, sqrt(re_err^2 + im_err^2).
  double statistical_error(std::size_t i) const;
};

/// exp[kappa T (e^{i lambda theta} - 1)].
std::complex<double> poisson_generating_function(double kappa, double total_time, double theta,
                                                 double lambda);

/// Re from the qubit started in |g> (1 - 2 E[p_e]); Im from (|g>+|e>)/sqrt(2)
/// (2 E[p_e] - 1). The same event trains are reused for every lambda.
GFEstimate fcs_estimate(const FcsConfig& config, unsigned threads = 0);

/// <theta_T^k> for k in {1, 2} by central differences at step h around
/// lambda = 0. Without h, the smallest symmetric step present in the grid is used.
double moments_from_gf(const GFEstimate& gf, int order, std::optional<double> h = std::nullopt);

struct FcsMoments {
  double mean = 0.0;           // <theta_T>
  double second_moment = 0.0;  // <theta_T^2>
  double variance = 0.0;
  double count_mean = 0.0;      // <m>
  double count_variance = 0.0;  // Var m
  double variance_to_mean = 0.0;
};

FcsMoments fcs_moments(const GFEstimate& gf, double theta, std::optional<double> h = std::nullopt);

struct ZeroFrequencyReport {
  double second_moment_fcs = 0.0;  // <theta_T^2> from the generating function
  double second_moment_psd = 0.0;  // T * S(0), DC bin of the averaged periodogram
  double variance_fcs = 0.0;       // <theta_T^2> - <theta_T>^2
  double variance_psd = 0.0;       // T * S(f -> 0), lowest non-DC bins
  double second_moment_rel_error = 0.0;
  double variance_rel_error = 0.0;
};

/// Cross-checks the FCS second moment against T times the zero-frequency PSD
/// of the simulated rate Omega(t) on the same ensemble.
ZeroFrequencyReport zero_freq_psd_check(const FcsConfig& config, unsigned threads = 0);

}  // namespace ifm
