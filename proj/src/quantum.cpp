#include "ifm/quantum.hpp"

#include <cmath>
#include <string>

namespace ifm {
namespace {

void require_valid_dim(const char* what, Eigen::Index dim) {
  if (dim != kQubit && dim != kQutrit) {
    throw DimensionError(std::string(what) + ": unsupported dimension", kQutrit,
                         static_cast<int>(dim));
  }
}

template <typename M>
bool all_finite(const M& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

void require_dim(const char* what, int expected, int actual) {
  if (expected != actual) throw DimensionError(what, expected, actual);
}

PureState PureState::basis(int dim, int k) {
  require_valid_dim("PureState::basis", dim);
  if (k < 0 || k >= dim) {
    throw InvalidArgument("PureState::basis: level " + std::to_string(k) +
                          " out of range");
  }
  Vec a = Vec::Zero(dim);
  a(k) = 1.0;
  return PureState(std::move(a));
}

PureState PureState::from_amplitudes(const Vec& amplitudes) {
  require_valid_dim("PureState::from_amplitudes", amplitudes.size());
  if (!all_finite(amplitudes)) {
    throw InvalidArgument("PureState: non-finite amplitude");
  }
  if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-12) {
    throw InvalidArgument("PureState: amplitudes are not normalized");
  }
  return PureState(amplitudes);
}

PureState PureState::unchecked(Vec amplitudes) {
  require_valid_dim("PureState::unchecked", amplitudes.size());
  return PureState(std::move(amplitudes));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Vec& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::from_matrix(const Mat& rho) {
  require_valid_dim("DensityMatrix::from_matrix", rho.rows());
  if (rho.rows() != rho.cols()) {
    throw DimensionError("DensityMatrix: not square", static_cast<int>(rho.rows()),
                         static_cast<int>(rho.cols()));
  }
  if (!all_finite(rho)) throw InvalidArgument("DensityMatrix: non-finite element");
  DensityMatrix out(rho);
  if (out.hermiticity_error() > 1e-12) {
    throw InvalidArgument("DensityMatrix: not Hermitian");
  }
  if (std::abs(out.trace() - 1.0) > 1e-12) {
    throw InvalidArgument("DensityMatrix: trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidArgument("DensityMatrix: negative eigenvalue");
  }
  return out;
}

DensityMatrix DensityMatrix::unchecked(Mat rho) {
  require_valid_dim("DensityMatrix::unchecked", rho.rows());
  return DensityMatrix(std::move(rho));
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

UnitaryOp UnitaryOp::identity(int dim) {
  require_valid_dim("UnitaryOp::identity", dim);
  return UnitaryOp(Mat::Identity(dim, dim));
}

UnitaryOp UnitaryOp::from_matrix(const Mat& u) {
  require_valid_dim("UnitaryOp::from_matrix", u.rows());
  if (u.rows() != u.cols()) {
    throw DimensionError("UnitaryOp: not square", static_cast<int>(u.rows()),
                         static_cast<int>(u.cols()));
  }
  if (!all_finite(u)) throw InvalidArgument("UnitaryOp: non-finite element");
  UnitaryOp out(u);
  if (out.unitarity_error() > 1e-12) {
    throw InvalidArgument("UnitaryOp: matrix is not unitary");
  }
  return out;
}

UnitaryOp UnitaryOp::unchecked(Mat u) {
  require_valid_dim("UnitaryOp::unchecked", u.rows());
  return UnitaryOp(std::move(u));
}

double UnitaryOp::unitarity_error() const {
  const Mat id = Mat::Identity(u_.rows(), u_.cols());
  return (u_.adjoint() * u_ - id).cwiseAbs().maxCoeff();
}

UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b) {
  require_dim("UnitaryOp product", a.dim(), b.dim());
  return UnitaryOp(a.u_ * b.u_);
}

PureState apply_unitary(const UnitaryOp& u, const PureState& psi) {
  require_dim("apply_unitary", u.dim(), psi.dim());
  return PureState::unchecked(u.matrix() * psi.amplitudes());
}

DensityMatrix apply_unitary(const UnitaryOp& u, const DensityMatrix& rho) {
  require_dim("apply_unitary", u.dim(), rho.dim());
  return DensityMatrix::unchecked(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

std::vector<double> populations(const PureState& psi) {
  std::vector<double> p(psi.dim());
  for (int k = 0; k < psi.dim(); ++k) p[k] = std::norm(psi[k]);
  return p;
}

std::vector<double> populations(const DensityMatrix& rho) {
  std::vector<double> p(rho.dim());
  for (int k = 0; k < rho.dim(); ++k) p[k] = rho(k, k).real();
  return p;
}

}  // namespace ifm
