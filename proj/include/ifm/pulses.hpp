// pulses.hpp - beam splitters, noise-driven B pulses, measurement channels and
// the closed-form amplitudes used as oracles for the protocols.
#pragma once

#include <array>
#include <vector>

#include "ifm/quantum.hpp"

namespace ifm {

/// Beam splitter for a sequence with N pulse slots; strength pi/(N+1).
struct BeamSplitterSpec {
  int slots = 1;

  double phi() const;
};

/// One noise sample inside a B-pulse window: rotation angle and axis angle.
struct PulseSegment {
  double delta_theta = 0.0;
  double chi = 0.0;
};

/// Time-ordered segments making up one B pulse (earliest first).
struct PulseSpec {
  std::vector<PulseSegment> segments;

  /// Sum of delta_theta over all segments.
  double total_angle() const;
};

/// exp(-i phi sigma^y_01 / 2) on the 0-1 subspace, identity on |2>.
UnitaryOp beam_splitter(const BeamSplitterSpec& spec);

/// Qubit rotation by theta about the axis (cos phi, -sin phi).
UnitaryOp qubit_b_pulse(double theta, double phi);

/// Qutrit rotation on the 1-2 subspace, identity on |0>.
UnitaryOp qutrit_b_pulse(double theta, double phi);

/// Literal ordered product of the segment rotations, acting on the g-e
/// subspace (dim 2) or the 1-2 subspace (dim 3).
UnitaryOp composed_pulse(const PulseSpec& spec, int dim);

/// 2x2 rotation block of composed_pulse, without embedding.
Eigen::Matrix2cd composed_block(const PulseSpec& spec);

/// Embeds a 2x2 block on levels 1-2 of a qutrit (identity on |0>).
Mat embed_upper(const Eigen::Matrix2cd& block);

/// Nonselective measurement of |2> versus {|0>,|1>}: P2 rho P2 + P01 rho P01.
DensityMatrix pifm_measure_channel(const DensityMatrix& rho);

/// Outcome-resolved form of the same measurement. `no_click` is the
/// unnormalized P01 rho P01 branch; `click_probability` is Tr(P2 rho).
struct AbsorptionSplit {
  Mat no_click;
  double click_probability = 0.0;
};
AbsorptionSplit split_on_absorption(const Mat& rho);

/// Final amplitudes (c0, c1, c2) of [S]^{N+1-n} B(N theta) [S]^n |0> with the
/// B axis at phi = -pi/2. Requires 0 < n < N.
std::array<Complex, 3> lumped_pulse_amplitudes(int slots, int n, double theta);

/// Closed-form state after S2 B(-theta) S2 B(theta) S2 |0> (N = 2).
PureState n2_alternating_state(double theta);

/// Marker population of pIFM driven by a train of N pi pulses.
double pifm_pi_train_p0(int slots);

}  // namespace ifm
