#pragma once

// Dense small-matrix kernels and subspace geometry.
//
// Everything here is templated on the scalar type and operates on Eigen
// dense objects; `Subspace` and friends are the double instantiations used
// by the rest of the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "angulus/error.hpp"

namespace angulus {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Largest principal angle, in radians, guaranteed to lie in [0, pi/2].
template <typename Scalar>
class BasicAngle {
 public:
  constexpr BasicAngle() = default;
  constexpr explicit BasicAngle(Scalar radians)
      : radians_(std::clamp(radians, Scalar(0), std::numbers::pi_v<Scalar> / 2)) {}

  constexpr Scalar radians() const { return radians_; }
  constexpr operator Scalar() const { return radians_; }

 private:
  Scalar radians_{0};
};

using Angle = BasicAngle<double>;

/// An s-dimensional subspace of R^d stored through a d x s orthonormal basis.
///
/// Instances only come out of `orthonormalize` or `from_orthonormal`, so the
/// basis always satisfies basis^T basis = I_s to working precision.
template <typename Scalar>
class BasicSubspace {
 public:
  using MatrixType = MatrixX<Scalar>;

  static constexpr Scalar kOrthonormalTol = Scalar(1e-12);

  /// Wraps a basis that is already orthonormal (checked to 1e-12 max-abs).
  static BasicSubspace from_orthonormal(MatrixType basis) {
    if (basis.cols() < 1 || basis.cols() > basis.rows()) {
      throw Error(ErrorCode::InvalidArgument, "subspace basis must be d x s with 1 <= s <= d");
    }
    const Scalar err = (basis.transpose() * basis - MatrixType::Identity(basis.cols(), basis.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (!(err <= kOrthonormalTol)) {
      throw Error(ErrorCode::InvalidArgument, "basis columns are not orthonormal");
    }
    return BasicSubspace(std::move(basis));
  }

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }
  const MatrixType& basis() const { return basis_; }

  /// Orthogonal projector onto the subspace.
  MatrixType projector() const { return basis_ * basis_.transpose(); }

 private:
  template <typename S>
  friend BasicSubspace<typename S::Scalar> orthonormalize(const Eigen::MatrixBase<S>&);

  explicit BasicSubspace(MatrixType basis) : basis_(std::move(basis)) {}

  MatrixType basis_;
};

using Subspace = BasicSubspace<double>;

template <typename Scalar>
struct QRFactors {
  MatrixX<Scalar> Q;  // orthogonal
  MatrixX<Scalar> T;  // upper triangular
};

/// Relative rank threshold used by `orthonormalize`.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal basis of the column space of `cols` (Householder QR).
/// Throws RankDeficient unless sigma_min > 1e-10 * sigma_max.
template <typename Derived>
BasicSubspace<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& cols) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = MatrixX<Scalar>;
  const Eigen::Index d = cols.rows();
  const Eigen::Index s = cols.cols();
  if (s < 1 || s > d) {
    throw Error(ErrorCode::RankDeficient, "need 1 <= s <= d columns, got " + std::to_string(s));
  }
  if (!cols.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "non-finite entries");
  }
  const MatrixType a = cols;
  const Eigen::JacobiSVD<MatrixType> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(s - 1) > Scalar(kRankTolerance) * sv(0))) {
    throw Error(ErrorCode::RankDeficient, "columns are numerically dependent");
  }
  const Eigen::HouseholderQR<MatrixType> qr(a);
  MatrixType q = qr.householderQ() * MatrixType::Identity(d, s);
  return BasicSubspace<Scalar>(std::move(q));
}

/// Householder QR of a square matrix: A = Q T. No sign convention on diag(T).
template <typename Derived>
QRFactors<typename Derived::Scalar> qr_factor(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = MatrixX<Scalar>;
  const Eigen::HouseholderQR<MatrixType> qr(a.eval());
  QRFactors<Scalar> out;
  out.Q = qr.householderQ();
  out.T = qr.matrixQR().template triangularView<Eigen::Upper>();
  return out;
}

/// Largest principal angle between the column spans of two orthonormal
/// d x s bases.
///
/// cos(theta) = sigma_min(U^T V). For small angles the cosine is badly
/// conditioned, so the equivalent sine form sin(theta) = ||V - U U^T V||_2
/// is used below pi/4.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar largest_principal_angle(const Eigen::MatrixBase<DerivedU>& u,
                                                  const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  using MatrixType = MatrixX<Scalar>;
  const Eigen::Index s = u.cols();
  MatrixType cross = u.transpose() * v;
  Scalar cos_min;
  if (s == 1) {
    cos_min = std::abs(cross(0, 0));
  } else {
    cos_min = Eigen::JacobiSVD<MatrixType>(cross).singularValues()(s - 1);
  }
  cos_min = std::clamp(cos_min, Scalar(0), Scalar(1));
  if (cos_min < std::sqrt(Scalar(0.5))) {
    return std::acos(cos_min);
  }
  MatrixType residual = v - u * cross;
  Scalar sin_max;
  if (s == 1) {
    sin_max = residual.norm();
  } else {
    sin_max = Eigen::JacobiSVD<MatrixType>(residual).singularValues()(0);
  }
  return std::asin(std::clamp(sin_max, Scalar(0), Scalar(1)));
}

template <typename Scalar>
BasicAngle<Scalar> principal_angle(const BasicSubspace<Scalar>& u, const BasicSubspace<Scalar>& v) {
  if (u.dim() != v.dim() || u.ambient_dim() != v.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "principal_angle needs subspaces of equal dimension");
  }
  return BasicAngle<Scalar>(largest_principal_angle(u.basis(), v.basis()));
}

/// sin of the largest principal angle; an equivalent metric on G(s,d).
template <typename Scalar>
Scalar grassmann_distance(const BasicSubspace<Scalar>& u, const BasicSubspace<Scalar>& v) {
  return std::sin(principal_angle(u, v).radians());
}

/// Minimum-norm minimizer of ||M x - b||_2 (complete orthogonal decomposition).
template <typename DerivedM, typename DerivedB>
VectorX<typename DerivedM::Scalar> min_norm_least_squares(const Eigen::MatrixBase<DerivedM>& m,
                                                          const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedM::Scalar;
  if (m.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "least squares: rows(M) != size(b)");
  }
  const Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(m.eval());
  return cod.solve(b.eval());
}

/// Numerical rank with the same relative threshold as `orthonormalize`.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& a,
                            typename Derived::Scalar rel_tol = kRankTolerance) {
  using Scalar = typename Derived::Scalar;
  const Eigen::JacobiSVD<MatrixX<Scalar>> svd(a.eval());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == Scalar(0)) return 0;
  return (sv.array() > rel_tol * sv(0)).count();
}

}  // namespace angulus
