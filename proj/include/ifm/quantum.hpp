// quantum.hpp - fixed-size (dim 2 or 3) states, density matrices and unitaries.
//
// All types are immutable values. Arithmetic results are never renormalized;
// drift is observable through norm_error()/unitarity_error() so tests can
// assert on it.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ifm/error.hpp"

namespace ifm {

using Complex = std::complex<double>;
using Vec = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr int kQubit = 2;
inline constexpr int kQutrit = 3;

class PureState {
 public:
  /// |k> in dimension dim.
  static PureState basis(int dim, int k);
  /// Validates dim, finiteness and normalization (|norm^2 - 1| <= 1e-12).
  static PureState from_amplitudes(const Vec& amplitudes);
  /// No validation beyond dim; used for results of unitary evolution.
  static PureState unchecked(Vec amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amplitudes() const { return amps_; }
  Complex operator[](int k) const { return amps_(k); }
  double norm_error() const { return std::abs(amps_.squaredNorm() - 1.0); }

 private:
  explicit PureState(Vec a) : amps_(std::move(a)) {}
  Vec amps_;
};

class DensityMatrix {
 public:
  static DensityMatrix from_pure(const PureState& psi);
  /// Validates Hermiticity, unit trace (1e-12) and eigenvalues >= -1e-10.
  static DensityMatrix from_matrix(const Mat& rho);
  static DensityMatrix unchecked(Mat rho);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Mat& matrix() const { return rho_; }
  Complex operator()(int r, int c) const { return rho_(r, c); }
  double trace() const { return rho_.trace().real(); }
  double purity() const { return (rho_ * rho_).trace().real(); }
  double hermiticity_error() const;

 private:
  explicit DensityMatrix(Mat m) : rho_(std::move(m)) {}
  Mat rho_;
};

class UnitaryOp {
 public:
  static UnitaryOp identity(int dim);
  /// Validates U^dagger U = I elementwise within 1e-12.
  static UnitaryOp from_matrix(const Mat& u);
  static UnitaryOp unchecked(Mat u);

  int dim() const { return static_cast<int>(u_.rows()); }
  const Mat& matrix() const { return u_; }
  Complex operator()(int r, int c) const { return u_(r, c); }
  UnitaryOp adjoint() const { return UnitaryOp(u_.adjoint()); }
  /// Largest elementwise deviation of U^dagger U from the identity.
  double unitarity_error() const;

  /// Operator product: (a * b) applies b first.
  friend UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b);

 private:
  explicit UnitaryOp(Mat u) : u_(std::move(u)) {}
  Mat u_;
};

PureState apply_unitary(const UnitaryOp& u, const PureState& psi);
DensityMatrix apply_unitary(const UnitaryOp& u, const DensityMatrix& rho);

/// Basis-state occupation probabilities.
std::vector<double> populations(const PureState& psi);
std::vector<double> populations(const DensityMatrix& rho);

void require_dim(const char* what, int expected, int actual);

}  // namespace ifm
