#pragma once

// Charts, tangent projection and differential operators on the unit sphere S^2
// embedded in R^3. Everything here is templated on the scalar type so the same
// code can be instantiated in extended precision by the test oracles.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tmsm {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vector3d = Vec3<double>;
using Matrix3d = Mat3<double>;

/// A point on S^2 in embedding coordinates. The norm is fixed to one at
/// construction; the only way to obtain an instance is through normalization.
template <typename Scalar = double>
class UnitVector {
 public:
  UnitVector() : v_(Scalar(1), Scalar(0), Scalar(0)) {}

  UnitVector(Scalar x1, Scalar x2, Scalar x3) : UnitVector(Vec3<Scalar>(x1, x2, x3)) {}

  explicit UnitVector(const Vec3<Scalar>& v) {
    using std::isfinite;
    const Scalar n = v.norm();
    if (!(n > Scalar(0)) || !isfinite(static_cast<double>(n))) {
      throw std::invalid_argument("UnitVector: cannot normalize a zero or non-finite vector");
    }
    v_ = v / n;
  }

  const Vec3<Scalar>& vec() const { return v_; }
  Scalar operator[](int i) const { return v_[i]; }
  Scalar dot(const UnitVector& other) const { return v_.dot(other.v_); }

  template <typename Other>
  UnitVector<Other> cast() const {
    return UnitVector<Other>(v_.template cast<Other>());
  }

  friend bool operator==(const UnitVector& l, const UnitVector& r) { return l.v_ == r.v_; }

 private:
  Vec3<Scalar> v_;
};

/// Chart coordinates: `a` is the polar angle measured from the +x1 axis,
/// `b` the azimuth in the x2-x3 plane.
template <typename Scalar = double>
struct SphericalCoord {
  Scalar a{0};
  Scalar b{0};
};

template <typename Scalar>
Scalar wrap_two_pi(Scalar b) {
  using std::floor;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  b -= two_pi * floor(b / two_pi);
  if (b >= two_pi) b -= two_pi;
  return b;
}

template <typename Scalar>
UnitVector<Scalar> to_euclidean(const SphericalCoord<Scalar>& z) {
  using std::cos;
  using std::sin;
  const Scalar b = wrap_two_pi(z.b);
  return UnitVector<Scalar>(cos(z.a), sin(z.a) * cos(b), sin(z.a) * sin(b));
}

/// Inverse chart. At the poles the azimuth is undefined and reported as 0.
template <typename Scalar>
SphericalCoord<Scalar> to_spherical(const UnitVector<Scalar>& x) {
  using std::acos;
  using std::atan2;
  using std::clamp;
  const Scalar x1 = clamp(x[0], Scalar(-1), Scalar(1));
  SphericalCoord<Scalar> z;
  z.a = acos(x1);
  if (x[1] == Scalar(0) && x[2] == Scalar(0)) {
    z.b = Scalar(0);
  } else {
    z.b = wrap_two_pi(atan2(x[2], x[1]));
  }
  return z;
}

/// Orthogonal projection onto the tangent plane at x, P = I - x x^T.
template <typename Scalar>
Mat3<Scalar> projection(const UnitVector<Scalar>& x) {
  return Mat3<Scalar>::Identity() - x.vec() * x.vec().transpose();
}

/// <P u, P v>, the Riemannian inner product of the tangential parts of two
/// ambient gradients.
template <typename Scalar, typename DerivedU, typename DerivedV>
Scalar manifold_inner(const UnitVector<Scalar>& x, const Eigen::MatrixBase<DerivedU>& u,
                      const Eigen::MatrixBase<DerivedV>& v) {
  const Vec3<Scalar> pu = u - x.vec() * x.vec().dot(u);
  const Vec3<Scalar> pv = v - x.vec() * x.vec().dot(v);
  return pu.dot(pv);
}

/// Laplace-Beltrami operator of f on S^2 from the ambient gradient and
/// Hessian of any smooth extension of f: tr(P H) - 2 x^T grad.
template <typename Scalar, typename DerivedG, typename DerivedH>
Scalar laplace_beltrami(const UnitVector<Scalar>& x, const Eigen::MatrixBase<DerivedG>& grad,
                        const Eigen::MatrixBase<DerivedH>& hess) {
  const Vec3<Scalar>& xv = x.vec();
  // tr(P H) = tr(H) - x^T H x
  const Scalar trace_ph = hess.trace() - xv.dot(hess * xv);
  return trace_ph - Scalar(2) * xv.dot(grad);
}

/// Jacobian of the inverse chart z(x) = (arccos(x1/r), atan2(x3, x2)) with
/// respect to the ambient coordinates, evaluated on the sphere (r = 1).
/// Row 0 is grad a, row 1 is grad b. Singular at the poles.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 3> chart_jacobian(const UnitVector<Scalar>& x) {
  using std::sqrt;
  const Scalar x1 = x[0], x2 = x[1], x3 = x[2];
  const Scalar rho2 = x2 * x2 + x3 * x3;
  const Scalar rho = sqrt(rho2);
  Eigen::Matrix<Scalar, 2, 3> j;
  // d/dx arccos(x1 / |x|) = -(e1 - x1 x) / sqrt(1 - x1^2)
  j(0, 0) = -(Scalar(1) - x1 * x1) / rho;
  j(0, 1) = x1 * x2 / rho;
  j(0, 2) = x1 * x3 / rho;
  j(1, 0) = Scalar(0);
  j(1, 1) = -x3 / rho2;
  j(1, 2) = x2 / rho2;
  return j;
}

/// Rotation matrix R with R * from = to (shortest arc).
template <typename Scalar>
Mat3<Scalar> rotation_between(const UnitVector<Scalar>& from, const UnitVector<Scalar>& to) {
  const Eigen::Quaternion<Scalar> q = Eigen::Quaternion<Scalar>::FromTwoVectors(from.vec(), to.vec());
  return q.toRotationMatrix();
}

/// Great-circle angle between two unit vectors, stable for small and
/// near-antipodal separations.
template <typename Scalar>
Scalar geodesic_angle(const UnitVector<Scalar>& x, const UnitVector<Scalar>& y) {
  using std::atan2;
  return atan2(x.vec().cross(y.vec()).norm(), x.vec().dot(y.vec()));
}

}  // namespace tmsm
