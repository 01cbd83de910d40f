#include "ifm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ifm/parallel.hpp"

namespace ifm {
namespace {

using std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Runs `realizations` noise draws at one grid point and evaluates each protocol
// in `protocols` on the same schedule. markers[p][r] is filled in index order.
std::vector<std::vector<double>> ensemble_markers(std::span<const Protocol> protocols,
                                                  const NoiseModel& model,
                                                  const ProtocolTiming& timing,
                                                  double sample_rate, std::size_t realizations,
                                                  std::uint64_t master_seed,
                                                  std::uint64_t param_index, unsigned threads) {
  std::vector<std::vector<double>> markers(protocols.size(),
                                           std::vector<double>(realizations));
  parallel_for(realizations, threads, [&](std::size_t r) {
    const std::uint64_t seed =
        derive_seed(master_seed, {static_cast<std::uint64_t>(timing.slots), param_index, r});
    const PulseSchedule schedule =
        trace_to_schedule(make_trace(model, timing, sample_rate, seed), timing);
    for (std::size_t p = 0; p < protocols.size(); ++p) {
      markers[p][r] = run_protocol(protocols[p], schedule).marker;
    }
  });
  return markers;
}

Error at_grid_point(int slots, double param, const std::exception& e) {
  return Error("grid point N=" + std::to_string(slots) + ", param=" + std::to_string(param) +
               ": " + e.what());
}

std::vector<int> poisson_slot_counts(const FcsConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  std::poisson_distribution<int> events(config.kappa * config.total_time);
  std::uniform_int_distribution<int> slot(0, config.slots - 1);
  std::vector<int> counts(config.slots, 0);
  const int m = events(rng);
  for (int e = 0; e < m; ++e) ++counts[slot(rng)];
  return counts;
}

void validate_fcs(const FcsConfig& config) {
  if (!(config.kappa >= 0.0)) throw InvalidArgument("fcs: kappa must be >= 0");
  if (!(config.total_time > 0.0)) throw InvalidArgument("fcs: T must be > 0");
  if (config.slots < 1) throw InvalidArgument("fcs: need at least one slot");
  if (config.realizations < 1) throw InvalidArgument("fcs: need at least one realization");
  for (double l : config.lambdas) {
    if (!std::isfinite(l)) throw InvalidArgument("fcs: lambda grid must be finite");
  }
}

}  // namespace

const char* noise_model_name(const NoiseModel& model) {
  return std::visit(Overloaded{
                        [](const ZeroSumNoise&) { return "zero_sum"; },
                        [](const WhiteNoise&) { return "white"; },
                        [](const TelegraphNoise&) { return "telegraph"; },
                        [](const ColoredPhaseNoise&) { return "colored_phase"; },
                    },
                    model);
}

ProtocolTiming TimingTemplate::for_slots(int slots) const {
  ProtocolTiming t{slots, tau_b, tau_bs};
  if (total_time) t.tau_b = *total_time / slots;
  t.validate();
  return t;
}

NoiseTrace make_trace(const NoiseModel& model, const ProtocolTiming& timing, double sample_rate,
                      std::uint64_t seed) {
  const double span = timing.sensing_span();
  return std::visit(
      Overloaded{
          [&](const ZeroSumNoise& m) {
            const std::vector<double> thetas = gen_zero_sum(m.theta_max, timing.slots, seed);
            const std::vector<double> phis(timing.slots, m.phi);
            return piecewise_trace(timing, sample_rate, thetas, phis);
          },
          [&](const WhiteNoise& m) {
            NoiseTrace trace{sample_rate, span, {}, {}};
            const std::size_t n = trace.expected_length();
            trace.zeta = gen_white(m.theta_lo, m.theta_hi, n, derive_seed(seed, {1}));
            for (double& z : trace.zeta) z /= timing.tau_b;
            trace.chi = gen_white(m.phi_lo, m.phi_hi, n, derive_seed(seed, {2}));
            return trace;
          },
          [&](const TelegraphNoise& m) {
            NoiseTrace trace{sample_rate, span, {}, {}};
            const TelegraphSpec spec{1.0 / m.kappa_inverse, m.delta_theta * sample_rate,
                                     sample_rate};
            trace.zeta = gen_telegraph(spec, span, seed);
            trace.chi.assign(trace.zeta.size(), m.phi);
            return trace;
          },
          [&](const ColoredPhaseNoise& m) {
            NoiseTrace trace{sample_rate, span, {}, {}};
            const std::size_t n = trace.expected_length();
            if (n == 0) throw InvalidArgument("make_trace: empty trace");
            const std::vector<double> x = gen_colored_exact(ColorSpec::of(m.color), n, seed);
            trace.chi.resize(n);
            for (std::size_t i = 0; i < n; ++i) trace.chi[i] = std::remainder(pi * x[i], 2.0 * pi);
            trace.zeta.assign(n, m.theta / timing.tau_b);
            return trace;
          },
      },
      model);
}

double EnsembleStats::std_error() const {
  return count == 0 ? 0.0 : std / std::sqrt(static_cast<double>(count));
}

EnsembleStats EnsembleStats::of(std::span<const double> samples) {
  EnsembleStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
  }
  s.std = std::sqrt(s.variance);
  return s;
}

void SweepConfig::validate() const {
  if (n_values.empty()) throw InvalidArgument("sweep: N_values must be nonempty");
  if (realizations < 1) throw InvalidArgument("sweep: R must be >= 1");
  if (!(timing.sample_rate > 0.0)) throw InvalidArgument("sweep: sample_rate must be > 0");
  for (int n : n_values) {
    if (n < 1) throw InvalidArgument("sweep: N values must be >= 1");
  }
}

SweepResult run_sweep(const SweepConfig& config, unsigned threads) {
  config.validate();
  SweepResult result;
  const Protocol protocols[] = {config.protocol};
  for (int n : config.n_values) {
    try {
      const ProtocolTiming timing = config.timing.for_slots(n);
      const auto markers = ensemble_markers(protocols, config.noise, timing,
                                            config.timing.sample_rate, config.realizations,
                                            config.master_seed, 0, threads);
      result.points.push_back({n, 0.0, EnsembleStats::of(markers[0])});
    } catch (const std::exception& e) {
      throw at_grid_point(n, 0.0, e);
    }
  }
  return result;
}

KappaSweepResult sweep_kappa_n(const SweepConfig& config, std::span<const double> kappa_inverse,
                               unsigned threads) {
  config.validate();
  const auto* telegraph = std::get_if<TelegraphNoise>(&config.noise);
  if (telegraph == nullptr) throw InvalidArgument("sweep_kappa_n: noise model must be telegraph");
  if (kappa_inverse.empty()) throw InvalidArgument("sweep_kappa_n: empty kappa^-1 grid");

  KappaSweepResult result;
  const Protocol protocols[] = {config.protocol};
  const double fs = config.timing.sample_rate;
  for (int n : config.n_values) {
    const ProtocolTiming timing = config.timing.for_slots(n);
    const double span = timing.sensing_span();
    for (double kinv : kappa_inverse) {
      if (!(kinv > 0.0) || kinv > span * (1.0 + 1e-9)) {
        throw InvalidArgument("sweep_kappa_n: kappa^-1 = " + std::to_string(kinv) +
                              " outside (0, T] for N = " + std::to_string(n));
      }
    }

    const std::size_t first = first_sample_at(timing.window_start(1), fs);
    const std::size_t samples =
        first_sample_at(timing.window_start(1) + timing.tau_b, fs) - first;
    const double ratio = std::abs(telegraph->delta_theta) * samples / (4.0 * pi);
    if (ratio > 0.5 && std::abs(ratio - std::round(ratio)) <= 1e-9) {
      result.anomalous_slots.push_back(n);
    }

    for (std::size_t k = 0; k < kappa_inverse.size(); ++k) {
      TelegraphNoise model = *telegraph;
      model.kappa_inverse = kappa_inverse[k];
      try {
        const auto markers = ensemble_markers(protocols, model, timing, fs, config.realizations,
                                              config.master_seed, k + 1, threads);
        result.points.push_back({n, kappa_inverse[k], EnsembleStats::of(markers[0])});
      } catch (const std::exception& e) {
        throw at_grid_point(n, kappa_inverse[k], e);
      }
    }
  }
  return result;
}

ClusteringResult clustering_sweep(const ClusteringConfig& config, unsigned threads) {
  if (config.n_values.empty() || config.kappa_inverse_fraction.empty()) {
    throw InvalidArgument("clustering_sweep: empty grid");
  }
  if (config.realizations < 1) throw InvalidArgument("clustering_sweep: R must be >= 1");
  ClusteringResult result;
  const Protocol protocols[] = {Protocol::Cifm, Protocol::Pifm};
  const TimingTemplate unit{1.0, 0.0, 1.0, std::nullopt};
  for (int n : config.n_values) {
    const ProtocolTiming timing = unit.for_slots(n);
    for (std::size_t k = 0; k < config.kappa_inverse_fraction.size(); ++k) {
      const double frac = config.kappa_inverse_fraction[k];
      if (!(frac > 0.0)) throw InvalidArgument("clustering_sweep: kappa^-1 must be > 0");
      const TelegraphNoise model{frac * timing.sensing_span(), config.theta, -pi / 2.0};
      const auto markers = ensemble_markers(protocols, model, timing, 1.0, config.realizations,
                                            config.master_seed, k + 1, threads);
      result.cifm.push_back({n, frac, EnsembleStats::of(markers[0])});
      result.pifm.push_back({n, frac, EnsembleStats::of(markers[1])});
    }
  }
  return result;
}

std::vector<Table1Row> table1() {
  struct Spec {
    const char* label;
    std::vector<double> thetas;
    double cifm;
    double pifm;
  };
  const double p = pi;
  const std::vector<Spec> specs = {
      {"pi, pi, 0, 0", {p, p, 0, 0}, 0.611, 0.283},
      {"pi, 0, pi, 0", {p, 0, p, 0}, 0.646, 0.387},
      {"pi, 0, 0, pi", {p, 0, 0, p}, 0.393, 0.283},
      {"0, pi, pi, 0", {0, p, p, 0}, 0.937, 0.387},
      {"0, pi, 0, pi", {0, p, 0, p}, 0.646, 0.387},
      {"0, 0, pi, pi", {0, 0, p, p}, 0.611, 0.283},
      {"pi, pi, -pi, -pi", {p, p, -p, -p}, 0.599, 0.605},
      {"pi, -pi, pi, -pi", {p, -p, p, -p}, 0.183, 0.605},
      {"pi, -pi, -pi, pi", {p, -p, -p, p}, 0.361, 0.605},
      {"-pi, pi, pi, -pi", {-p, p, p, -p}, 0.361, 0.605},
      {"-pi, pi, -pi, pi", {-p, p, -p, p}, 0.183, 0.605},
      {"-pi, -pi, pi, pi", {-p, -p, p, p}, 0.599, 0.605},
  };
  std::vector<Table1Row> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs) {
    const PulseSchedule schedule = schedule_from_angles(s.thetas, -pi / 2.0);
    rows.push_back({s.label, s.thetas, run_protocol(Protocol::Cifm, schedule).marker,
                    run_protocol(Protocol::Pifm, schedule).marker, s.cifm, s.pifm});
  }
  return rows;
}

bool table1_row_matches(const Table1Row& row) {
  const auto r3 = [](double v) { return std::round(v * 1000.0); };
  return r3(row.cifm_p0) == r3(row.reference_cifm) && r3(row.pifm_p0) == r3(row.reference_pifm);
}

double GFEstimate::statistical_error(std::size_t i) const {
  return std::hypot(re_error.at(i), im_error.at(i));
}

std::complex<double> poisson_generating_function(double kappa, double total_time, double theta,
                                                 double lambda) {
  const std::complex<double> phase = std::polar(1.0, lambda * theta);
  return std::exp(kappa * total_time * (phase - 1.0));
}

GFEstimate fcs_estimate(const FcsConfig& config, unsigned threads) {
  validate_fcs(config);
  if (config.lambdas.empty()) throw InvalidArgument("fcs: empty lambda grid");
  const std::size_t nl = config.lambdas.size();
  const std::size_t reps = config.realizations;
  std::vector<double> re(nl * reps);
  std::vector<double> im(nl * reps);

  const PureState ground = PureState::basis(kQubit, 0);
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const PureState superposed = PureState::from_amplitudes(plus);

  parallel_for(reps, threads, [&](std::size_t r) {
    const std::vector<int> counts = poisson_slot_counts(config, derive_seed(config.seed, {r}));
    const std::vector<double> zeros(counts.size(), 0.0);
    PulseSchedule schedule = schedule_from_angles(zeros, -pi / 2.0);
    for (std::size_t l = 0; l < nl; ++l) {
      for (std::size_t j = 0; j < counts.size(); ++j) {
        schedule.pulses[j].segments[0].delta_theta = counts[j] * config.lambdas[l] * config.theta;
      }
      // p_g - p_e equals 1 - 2 p_e but stays exact when nothing rotates.
      const auto g = run_qubit(schedule, ground);
      const auto s = run_qubit(schedule, superposed);
      re[l * reps + r] = g.p(0) - g.p(1);
      im[l * reps + r] = s.p(1) - s.p(0);
    }
  });

  GFEstimate gf;
  gf.lambda = config.lambdas;
  for (std::size_t l = 0; l < nl; ++l) {
    const auto re_stats = EnsembleStats::of(std::span(re).subspan(l * reps, reps));
    const auto im_stats = EnsembleStats::of(std::span(im).subspan(l * reps, reps));
    gf.re.push_back(re_stats.mean);
    gf.im.push_back(im_stats.mean);
    gf.re_error.push_back(re_stats.std_error());
    gf.im_error.push_back(im_stats.std_error());
  }
  return gf;
}

double moments_from_gf(const GFEstimate& gf, int order, std::optional<double> h) {
  if (order != 1 && order != 2) throw InvalidArgument("moments_from_gf: order must be 1 or 2");
  const auto find = [&](double lambda) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < gf.lambda.size(); ++i) {
      if (std::abs(gf.lambda[i] - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) return i;
    }
    return std::nullopt;
  };
  const auto zero = find(0.0);
  if (!zero) throw InvalidArgument("moments_from_gf: lambda grid lacks 0");
  if (!h) {
    for (double l : gf.lambda) {
      if (l > 0.0 && find(-l) && (!h || l < *h)) h = l;
    }
  }
  if (!h || !(*h > 0.0)) throw InvalidArgument("moments_from_gf: no symmetric step around 0");
  const auto up = find(*h);
  const auto down = find(-*h);
  if (!up || !down) throw InvalidArgument("moments_from_gf: lambda grid lacks +/-h");

  if (order == 1) {
    // <theta_T> = -i dLambda/dlambda; only Im Lambda contributes at first order.
    return (gf.im[*up] - gf.im[*down]) / (2.0 * *h);
  }
  return -(gf.re[*up] - 2.0 * gf.re[*zero] + gf.re[*down]) / (*h * *h);
}

FcsMoments fcs_moments(const GFEstimate& gf, double theta, std::optional<double> h) {
  if (theta == 0.0) throw InvalidArgument("fcs_moments: theta must be nonzero");
  FcsMoments m;
  m.mean = moments_from_gf(gf, 1, h);
  m.second_moment = moments_from_gf(gf, 2, h);
  m.variance = m.second_moment - m.mean * m.mean;
  m.count_mean = m.mean / theta;
  m.count_variance = m.variance / (theta * theta);
  m.variance_to_mean = m.count_mean != 0.0 ? m.count_variance / m.count_mean : 0.0;
  return m;
}

ZeroFrequencyReport zero_freq_psd_check(const FcsConfig& config, unsigned threads) {
  validate_fcs(config);
  if (config.slots < 8) throw InvalidArgument("zero_freq_psd_check: need >= 8 slots");
  constexpr double kStep = 0.01;
  FcsConfig fcs = config;
  fcs.lambdas = {-kStep, 0.0, kStep};
  const GFEstimate gf = fcs_estimate(fcs, threads);

  const double dt = config.total_time / config.slots;
  const double fs = 1.0 / dt;
  std::vector<PsdEstimate> spectra(config.realizations);
  parallel_for(config.realizations, threads, [&](std::size_t r) {
    const std::vector<int> counts = poisson_slot_counts(config, derive_seed(config.seed, {r}));
    std::vector<double> rate(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) rate[j] = counts[j] * config.theta / dt;
    spectra[r] = estimate_psd(rate, fs, Window::Rectangular, 1);
  });
  const PsdEstimate mean_psd = average_psd(spectra);

  ZeroFrequencyReport rep;
  rep.second_moment_fcs = moments_from_gf(gf, 2, kStep);
  rep.variance_fcs = rep.second_moment_fcs - std::pow(moments_from_gf(gf, 1, kStep), 2);
  rep.second_moment_psd = config.total_time * mean_psd.two_sided(0);
  constexpr std::size_t kLowBins = 3;
  double low = 0.0;
  for (std::size_t k = 1; k <= kLowBins; ++k) low += mean_psd.two_sided(k);
  rep.variance_psd = config.total_time * low / kLowBins;
  rep.second_moment_rel_error = relative_difference(rep.second_moment_fcs, rep.second_moment_psd);
  rep.variance_rel_error = relative_difference(rep.variance_fcs, rep.variance_psd);
  return rep;
}

}  // namespace ifm
