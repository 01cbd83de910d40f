#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifm/pulses.hpp"
#include "oracles.hpp"

using namespace ifm;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const Mat& a, const oracle::M3& b) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(a(i, j) - b[i][j]));
  return d;
}

double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(BeamSplitter, AngleInvariants) {
  for (int n = 1; n <= 200; ++n) {
    const double phi = BeamSplitterSpec{n}.phi();
    EXPECT_GT(phi, 0.0);
    EXPECT_LE(phi, kPi / 2);
    EXPECT_NEAR(phi * (n + 1), kPi, 1e-12);
  }
  EXPECT_THROW(beam_splitter({0}), InvalidArgument);
}

TEST(BeamSplitter, SingleSlotSplitsGroundEvenly) {
  const auto u = beam_splitter({1});
  EXPECT_NEAR(u(0, 0).real(), std::cos(kPi / 4), 1e-15);
  EXPECT_NEAR(u(1, 0).real(), std::sin(kPi / 4), 1e-15);
}

TEST(BeamSplitter, LeavesTopLevelAlone) {
  for (int n : {1, 2, 7, 40}) {
    const auto u = beam_splitter({n});
    EXPECT_EQ(u(2, 2), Complex(1.0));
    EXPECT_EQ(u(0, 2), Complex(0.0));
    EXPECT_EQ(u(1, 2), Complex(0.0));
  }
}

TEST(BeamSplitter, TwoSlotMatrix) {
  // (sqrt3/2) I01 - (i/2) sigma^y_01 + |2><2|.
  const auto u = beam_splitter({2});
  EXPECT_NEAR(std::abs(u(0, 0) - std::sqrt(3.0) / 2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(0, 1) - Complex(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 0) - Complex(0.5)), 0.0, 1e-15);
  EXPECT_LT(max_diff(u.matrix(), oracle::splitter(2)), 1e-15);
}

TEST(QubitPulse, Examples) {
  EXPECT_LT(max_diff(qubit_b_pulse(0.0, 0.3).matrix(), Mat::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_diff(qubit_b_pulse(2 * kPi, 1.1).matrix(), -Mat::Identity(2, 2)), 1e-15);
  const auto e = apply_unitary(qubit_b_pulse(kPi, -kPi / 2), PureState::basis(2, 0));
  EXPECT_NEAR(populations(e)[1], 1.0, 1e-15);
}

TEST(QutritPulse, Examples) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    const double phi = ang(rng);
    EXPECT_LT(max_diff(qutrit_b_pulse(4 * kPi, phi).matrix(), Mat::Identity(3, 3)), 1e-12);
    Mat flipped = -Mat::Identity(3, 3);
    flipped(0, 0) = 1.0;
    EXPECT_LT(max_diff(qutrit_b_pulse(2 * kPi, phi).matrix(), flipped), 1e-12);
    const auto g = apply_unitary(qutrit_b_pulse(ang(rng), phi), PureState::basis(3, 0));
    EXPECT_EQ(g.amplitudes(), PureState::basis(3, 0).amplitudes());
  }
}

TEST(QutritPulse, MatchesDefiningFormula) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-3 * kPi, 3 * kPi);
  for (int i = 0; i < 100; ++i) {
    const double theta = ang(rng), phi = ang(rng);
    EXPECT_LT(max_diff(qutrit_b_pulse(theta, phi).matrix(), oracle::bpulse(theta, phi)), 1e-14);
  }
}

TEST(PulseProperties, AllBuildersAreUnitary) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_LT(qubit_b_pulse(ang(rng), ang(rng)).unitarity_error(), 1e-12);
    EXPECT_LT(qutrit_b_pulse(ang(rng), ang(rng)).unitarity_error(), 1e-12);
    EXPECT_LT(beam_splitter({1 + i}).unitarity_error(), 1e-12);
    PulseSpec spec;
    for (int p = 0; p < 20; ++p) spec.segments.push_back({ang(rng), ang(rng)});
    EXPECT_LT(composed_pulse(spec, 3).unitarity_error(), 1e-12);
    EXPECT_LT(composed_pulse(spec, 2).unitarity_error(), 1e-12);
  }
}

TEST(PulseProperties, FourPiPeriodicity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const double theta = 3 * ang(rng), phi = ang(rng);
    EXPECT_LT(max_diff(qutrit_b_pulse(theta + 4 * kPi, phi).matrix(),
                       qutrit_b_pulse(theta, phi).matrix()),
              1e-12);
  }
}

TEST(ComposedPulse, SingleSegmentEqualsPulse) {
  const PulseSpec spec{{{0.7, 0.3}}};
  EXPECT_LT(max_diff(composed_pulse(spec, 3).matrix(), qutrit_b_pulse(0.7, 0.3).matrix()), 1e-15);
  EXPECT_LT(max_diff(composed_pulse(spec, 2).matrix(), qubit_b_pulse(0.7, 0.3).matrix()), 1e-15);
}

TEST(ComposedPulse, SameAxisHalvesAdd) {
  const PulseSpec spec{{{0.45, -1.2}, {0.45, -1.2}}};
  EXPECT_LT(max_diff(composed_pulse(spec, 3).matrix(), qutrit_b_pulse(0.9, -1.2).matrix()), 1e-12);
}

TEST(ComposedPulse, NoncommutingAxesFollowTimeOrder) {
  const PulseSpec spec{{{kPi, 0.0}, {kPi, kPi / 2}}};
  const auto expected = oracle::mul(oracle::bpulse(kPi, kPi / 2), oracle::bpulse(kPi, 0.0));
  const Mat got = composed_pulse(spec, 3).matrix();
  EXPECT_LT(max_diff(got, expected), 1e-14);
  EXPECT_GT(max_diff(got, qutrit_b_pulse(2 * kPi, 0.0).matrix()), 0.5);
}

TEST(ComposedPulse, RandomSegmentsMatchOrderedProduct) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    PulseSpec spec;
    oracle::M3 expected = oracle::identity();
    const double shared = ang(rng);
    for (int p = 0; p < 30; ++p) {
      // Mix runs of a repeated axis with fresh axes.
      const double chi = (p % 3 == 0) ? ang(rng) : shared;
      const double dt = ang(rng) / 5;
      spec.segments.push_back({dt, chi});
      expected = oracle::mul(oracle::bpulse(dt, chi), expected);
    }
    EXPECT_LT(max_diff(composed_pulse(spec, 3).matrix(), expected), 1e-12);
  }
}

TEST(ComposedPulse, SharedAxisCollapsesToTotalAngle) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    PulseSpec spec;
    const double chi = ang(rng);
    for (int p = 0; p < 250; ++p) spec.segments.push_back({ang(rng) / 50, chi});
    EXPECT_LT(max_diff(composed_pulse(spec, 3).matrix(),
                       qutrit_b_pulse(spec.total_angle(), chi).matrix()),
              1e-12);
  }
}

TEST(ComposedPulse, Errors) {
  EXPECT_THROW(composed_pulse(PulseSpec{}, 3), InvalidArgument);
  EXPECT_THROW(composed_pulse(PulseSpec{{{0.1, 0.0}}}, 4), DimensionError);
}

TEST(MeasureChannel, Examples) {
  Mat diag = Mat::Zero(3, 3);
  diag(0, 0) = 0.2;
  diag(1, 1) = 0.3;
  diag(2, 2) = 0.5;
  const auto d = DensityMatrix::from_matrix(diag);
  EXPECT_EQ(pifm_measure_channel(d).matrix(), d.matrix());

  Vec plus(3);
  plus << 0.0, M_SQRT1_2, M_SQRT1_2;
  const auto out = pifm_measure_channel(DensityMatrix::from_pure(PureState::from_amplitudes(plus)));
  Mat expected = Mat::Zero(3, 3);
  expected(1, 1) = 0.5;
  expected(2, 2) = 0.5;
  EXPECT_LT(max_diff(out.matrix(), expected), 1e-15);
  EXPECT_THROW(pifm_measure_channel(DensityMatrix::from_pure(PureState::basis(2, 0))),
               DimensionError);
}

TEST(MeasureChannel, IdempotentAndErasesCoherencesExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    auto psi = PureState::basis(3, 0);
    for (int k = 0; k < 4; ++k) {
      psi = apply_unitary(beam_splitter({1 + k}) * qutrit_b_pulse(ang(rng), ang(rng)), psi);
    }
    const auto once = pifm_measure_channel(DensityMatrix::from_pure(psi));
    const auto twice = pifm_measure_channel(once);
    EXPECT_EQ(once.matrix(), twice.matrix());
    EXPECT_NEAR(once.trace(), 1.0, 1e-12);
    for (auto [r, c] : {std::pair{0, 2}, {1, 2}, {2, 0}, {2, 1}}) {
      EXPECT_EQ(once(r, c), Complex(0.0));
    }
  }
}

TEST(AbsorptionSplit, ConservesWeight) {
  Vec v(3);
  v << 0.6, Complex(0.0, 0.48), 0.64;
  const Mat rho = v * v.adjoint();
  const auto split = split_on_absorption(rho);
  EXPECT_NEAR(split.click_probability, std::norm(v(2)), 1e-15);
  EXPECT_NEAR(split.no_click.trace().real() + split.click_probability, 1.0, 1e-15);
  EXPECT_EQ(split.no_click(2, 2), Complex(0.0));
  EXPECT_EQ(split.no_click(0, 1), rho(0, 1));
}

TEST(LumpedPulse, ZeroAngleEndsInOne) {
  const auto c = lumped_pulse_amplitudes(10, 3, 0.0);
  EXPECT_NEAR(std::abs(c[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[1] - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[2]), 0.0, 1e-15);
}

TEST(LumpedPulse, RangeChecked) {
  EXPECT_THROW(lumped_pulse_amplitudes(5, 0, 0.1), InvalidArgument);
  EXPECT_THROW(lumped_pulse_amplitudes(5, 5, 0.1), InvalidArgument);
}

TEST(LumpedPulse, StrongPulseIsMissedAtLargeN) {
  // Fixed total N theta; the marker amplitude decays like sin(n pi/(N+1)) with n = 1.
  for (int n : {100, 1000, 10000}) {
    const auto c = lumped_pulse_amplitudes(n, 1, 3.0 / n);
    EXPECT_LT(std::abs(c[0]), 10.0 / n);
    EXPECT_LT(std::abs(c[2]), 10.0 / n);
  }
}

TEST(LumpedPulse, MatchesMatrixProduct) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> slots(2, 40);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_slots = slots(rng);
    const int n = std::uniform_int_distribution<int>(1, n_slots - 1)(rng);
    const double theta = ang(rng);
    // [S]^{N+1-n} B(N theta) [S]^n |0>.
    const auto s = oracle::splitter(n_slots);
    oracle::V3 psi{1.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) psi = oracle::act(s, psi);
    psi = oracle::act(oracle::bpulse(n_slots * theta, -kPi / 2), psi);
    for (int k = 0; k < n_slots + 1 - n; ++k) psi = oracle::act(s, psi);
    const auto c = lumped_pulse_amplitudes(n_slots, n, theta);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(c[k] - psi[k]), 0.0, 1e-10);
  }
}

TEST(AlternatingPair, MatchesMatrixProduct) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = trial == 0 ? 0.0 : ang(rng);
    const auto s = oracle::splitter(2);
    oracle::V3 psi{1.0, 0.0, 0.0};
    psi = oracle::act(s, psi);
    psi = oracle::act(s, oracle::act(oracle::bpulse(theta, -kPi / 2), psi));
    psi = oracle::act(s, oracle::act(oracle::bpulse(-theta, -kPi / 2), psi));
    const auto got = n2_alternating_state(theta);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(got[k] - psi[k]), 0.0, 1e-10);
    EXPECT_LT(got.norm_error(), 1e-12);
  }
}

TEST(AlternatingPair, ZeroAngleEndsInOne) {
  const auto psi = n2_alternating_state(0.0);
  EXPECT_NEAR(std::abs(psi[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[2]), 0.0, 1e-15);
}

TEST(AlternatingPair, SmallAngleSeries) {
  // Second-order Taylor expansion of the closed form, worked out by hand:
  // c0 = (sqrt3 - 1) t^2/16, c1 = 1 + (sqrt3 - 2) t^2/16, c2 = (1 - sqrt3) t/4.
  const double r3 = std::sqrt(3.0);
  for (double t : {1e-2, 3e-3, 1e-3}) {
    const auto psi = n2_alternating_state(t);
    EXPECT_NEAR(psi[0].real(), (r3 - 1) * t * t / 16, 2 * t * t * t);
    EXPECT_NEAR(psi[1].real(), 1 + (r3 - 2) * t * t / 16, 2 * t * t * t);
    EXPECT_NEAR(psi[2].real(), (1 - r3) * t / 4, 2 * t * t * t);
  }
}

TEST(PiTrain, ClosedForm) {
  EXPECT_NEAR(pifm_pi_train_p0(1), 0.25, 1e-15);
  EXPECT_NEAR(pifm_pi_train_p0(4), 0.6054, 5e-5);
  EXPECT_EQ(std::round(pifm_pi_train_p0(4) * 1000), 605);
  for (int n = 1; n < 300; ++n) EXPECT_LT(pifm_pi_train_p0(n), pifm_pi_train_p0(n + 1));
  EXPECT_GT(pifm_pi_train_p0(100000), 0.9999);
  EXPECT_THROW(pifm_pi_train_p0(0), InvalidArgument);
}
