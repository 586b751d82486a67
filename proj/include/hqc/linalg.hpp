#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace hqc {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Frame = Eigen::Matrix<cplx, 4, 2>;

inline constexpr cplx kI{0.0, 1.0};

/// Largest entry modulus.
template <typename Derived>
double maxAbs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

/// max |U^dagger U - 1|.
template <typename Derived>
double unitarityDefect(const Eigen::MatrixBase<Derived>& u) {
  using M = typename Derived::PlainObject;
  return maxAbs(u.adjoint() * u - M::Identity(u.rows(), u.cols()));
}

template <typename Derived>
double hermiticityDefect(const Eigen::MatrixBase<Derived>& h) {
  return maxAbs(h - h.adjoint());
}

/// exp(-i H dt) for Hermitian H through its spectral decomposition.
template <int N>
Eigen::Matrix<cplx, N, N> hermitianPropagator(const Eigen::Matrix<cplx, N, N>& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, N, N>> es(h);
  const auto& v = es.eigenvectors();
  Eigen::Matrix<cplx, N, 1> phases;
  for (int k = 0; k < N; ++k) phases(k) = std::exp(-kI * es.eigenvalues()(k) * dt);
  return v * phases.asDiagonal() * v.adjoint();
}

/// exp(A) for anti-Hermitian A.
template <int N>
Eigen::Matrix<cplx, N, N> antiHermitianExp(const Eigen::Matrix<cplx, N, N>& a) {
  // A = -i H with H = i A Hermitian.
  const Eigen::Matrix<cplx, N, N> h = kI * a;
  return hermitianPropagator<N>(0.5 * (h + h.adjoint()), 1.0);
}

/// Unitary factor of the polar decomposition M = W P.
template <int N>
Eigen::Matrix<cplx, N, N> polarUnitary(const Eigen::Matrix<cplx, N, N>& m) {
  Eigen::JacobiSVD<Eigen::Matrix<cplx, N, N>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Orthonormalize the columns of a 4x2 frame symmetrically (Loewdin).
/// Returns the smallest singular value of the input through `minSingular`.
inline Frame loewdin(const Frame& f, double* minSingular = nullptr) {
  // F (F^dagger F)^{-1/2}
  Eigen::SelfAdjointEigenSolver<Mat2> es(Mat2(f.adjoint() * f));
  const auto& lambda = es.eigenvalues();
  if (minSingular != nullptr) *minSingular = std::sqrt(std::max(0.0, lambda(0)));
  Eigen::Vector2d inv;
  for (int k = 0; k < 2; ++k) inv(k) = lambda(k) > 0.0 ? 1.0 / std::sqrt(lambda(k)) : 0.0;
  return f * (es.eigenvectors() * inv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
}

} // namespace hqc
