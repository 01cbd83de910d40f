#include "ifm/pulses.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ifm {
namespace {

using std::numbers::pi;

const Complex kI{0.0, 1.0};

Eigen::Matrix2cd rotation_block(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  // n.sigma has <lower|n.sigma|upper> = e^{i phi}, <upper|n.sigma|lower> = e^{-i phi}.
  Eigen::Matrix2cd b;
  b(0, 0) = c;
  b(1, 1) = c;
  b(0, 1) = -kI * s * std::polar(1.0, phi);
  b(1, 0) = -kI * s * std::polar(1.0, -phi);
  return b;
}

}  // namespace

Mat embed_upper(const Eigen::Matrix2cd& block) {
  Mat u = Mat::Identity(3, 3);
  u.block<2, 2>(1, 1) = block;
  return u;
}

double BeamSplitterSpec::phi() const { return pi / (slots + 1); }

double PulseSpec::total_angle() const {
  double sum = 0.0;
  for (const auto& seg : segments) sum += seg.delta_theta;
  return sum;
}

UnitaryOp beam_splitter(const BeamSplitterSpec& spec) {
  if (spec.slots < 1) throw InvalidArgument("beam_splitter: N must be >= 1");
  const double half = spec.phi() / 2.0;
  Mat u = Mat::Identity(3, 3);
  u(0, 0) = std::cos(half);
  u(1, 1) = std::cos(half);
  u(0, 1) = -std::sin(half);
  u(1, 0) = std::sin(half);
  return UnitaryOp::unchecked(std::move(u));
}

UnitaryOp qubit_b_pulse(double theta, double phi) {
  return UnitaryOp::unchecked(Mat(rotation_block(theta, phi)));
}

UnitaryOp qutrit_b_pulse(double theta, double phi) {
  return UnitaryOp::unchecked(embed_upper(rotation_block(theta, phi)));
}

Eigen::Matrix2cd composed_block(const PulseSpec& spec) {
  if (spec.segments.empty()) {
    throw InvalidArgument("composed_pulse: empty segment list");
  }
  // Rotations about a common axis add, so runs with equal chi collapse to one rotation.
  Eigen::Matrix2cd total = Eigen::Matrix2cd::Identity();
  double chi = spec.segments.front().chi;
  double angle = 0.0;
  for (const auto& seg : spec.segments) {
    if (seg.chi != chi) {
      total = rotation_block(angle, chi) * total;
      chi = seg.chi;
      angle = 0.0;
    }
    angle += seg.delta_theta;
  }
  total = rotation_block(angle, chi) * total;
  return total;
}

UnitaryOp composed_pulse(const PulseSpec& spec, int dim) {
  const Eigen::Matrix2cd block = composed_block(spec);
  if (dim == kQubit) return UnitaryOp::unchecked(Mat(block));
  if (dim == kQutrit) return UnitaryOp::unchecked(embed_upper(block));
  throw DimensionError("composed_pulse", kQutrit, dim);
}

DensityMatrix pifm_measure_channel(const DensityMatrix& rho) {
  require_dim("pifm_measure_channel", kQutrit, rho.dim());
  Mat out = rho.matrix();
  out(0, 2) = out(1, 2) = out(2, 0) = out(2, 1) = 0.0;
  return DensityMatrix::unchecked(std::move(out));
}

AbsorptionSplit split_on_absorption(const Mat& rho) {
  require_dim("split_on_absorption", kQutrit, static_cast<int>(rho.rows()));
  AbsorptionSplit split{rho, rho(2, 2).real()};
  split.no_click.row(2).setZero();
  split.no_click.col(2).setZero();
  return split;
}

std::array<Complex, 3> lumped_pulse_amplitudes(int slots, int n, double theta) {
  if (n <= 0 || n >= slots) {
    throw InvalidArgument("lumped_pulse_amplitudes: need 0 < n < N, got n=" +
                          std::to_string(n) + ", N=" + std::to_string(slots));
  }
  const double phi = BeamSplitterSpec{slots}.phi();
  const double s4 = std::sin(slots * theta / 4.0);
  const double c4 = std::cos(slots * theta / 4.0);
  return {Complex(std::sin(n * phi) * s4 * s4),
          Complex(c4 * c4 + std::cos(n * phi) * s4 * s4),
          Complex(std::sin(slots * theta / 2.0) * std::sin(n * phi / 2.0))};
}

PureState n2_alternating_state(double theta) {
  const double r3 = std::sqrt(3.0);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Vec a(3);
  a(0) = 3.0 * r3 / 8.0 - 2.0 * r3 / 8.0 * c - r3 / 8.0 * c * c - 0.25 * s * s;
  a(1) = 3.0 / 8.0 + 2.0 / 8.0 * c + 3.0 / 8.0 * c * c + r3 / 4.0 * s * s;
  a(2) = (2.0 - r3) / 4.0 * s * c - r3 / 4.0 * s;
  return PureState::unchecked(std::move(a));
}

double pifm_pi_train_p0(int slots) {
  if (slots < 1) throw InvalidArgument("pifm_pi_train_p0: N must be >= 1");
  return std::pow(std::cos(pi / (2.0 * (slots + 1))), 2.0 * (slots + 1));
}

}  // namespace ifm
