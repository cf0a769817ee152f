#pragma once

// von Mises-Fisher and Kent densities on S^2: unnormalized log densities,
// ambient scores and score Jacobians, and the two model-dependent pieces of
// the manifold score matching objective.

#include "tmsm/sphere_geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace tmsm {

template <typename Scalar = double>
class VmfParams {
 public:
  VmfParams(const UnitVector<Scalar>& mu, Scalar kappa) : mu_(mu), kappa_(kappa) {
    if (!(kappa > Scalar(0))) {
      throw std::invalid_argument("VmfParams: kappa must be positive");
    }
  }

  const UnitVector<Scalar>& mu() const { return mu_; }
  Scalar kappa() const { return kappa_; }

 private:
  UnitVector<Scalar> mu_;
  Scalar kappa_;
};

/// Kent (FB5) parameters on S^2 with ovalness convention alpha_1 = alpha,
/// alpha_2 = -alpha. The frame {mu, gamma1, gamma2} is orthonormalized at
/// construction and unimodality (2 alpha < kappa) is enforced.
template <typename Scalar = double>
class KentParams {
 public:
  /// gamma1_hint only needs to be non-parallel to mu; it is Gram-Schmidt
  /// orthogonalized against mu and gamma2 is completed as mu x gamma1.
  KentParams(const UnitVector<Scalar>& mu, const Vec3<Scalar>& gamma1_hint, Scalar kappa, Scalar alpha)
      : mu_(mu), kappa_(kappa), alpha_(alpha) {
    check_shape(kappa, alpha);
    const Vec3<Scalar> g1 = gamma1_hint - mu.vec() * mu.vec().dot(gamma1_hint);
    if (!(g1.norm() > Scalar(1e-10) * gamma1_hint.norm())) {
      throw std::invalid_argument("KentParams: gamma1 hint is parallel to mu");
    }
    gamma1_ = UnitVector<Scalar>(g1);
    gamma2_ = UnitVector<Scalar>(mu_.vec().cross(gamma1_.vec()));
  }

  /// Frame given as the columns (mu, gamma1, gamma2) of a rotation matrix.
  KentParams(const Mat3<Scalar>& frame, Scalar kappa, Scalar alpha)
      : KentParams(UnitVector<Scalar>(Vec3<Scalar>(frame.col(0))), Vec3<Scalar>(frame.col(1)), kappa, alpha) {}

  const UnitVector<Scalar>& mu() const { return mu_; }
  const UnitVector<Scalar>& gamma1() const { return gamma1_; }
  const UnitVector<Scalar>& gamma2() const { return gamma2_; }
  Scalar kappa() const { return kappa_; }
  Scalar alpha() const { return alpha_; }

  Mat3<Scalar> frame() const {
    Mat3<Scalar> f;
    f << mu_.vec(), gamma1_.vec(), gamma2_.vec();
    return f;
  }

  /// Same distribution with gamma1, gamma2 negated.
  KentParams flipped() const {
    KentParams k = *this;
    k.gamma1_ = UnitVector<Scalar>(Vec3<Scalar>(-gamma1_.vec()));
    k.gamma2_ = UnitVector<Scalar>(Vec3<Scalar>(-gamma2_.vec()));
    return k;
  }

 private:
  static void check_shape(Scalar kappa, Scalar alpha) {
    if (!(kappa > Scalar(0))) throw std::invalid_argument("KentParams: kappa must be positive");
    if (!(alpha >= Scalar(0))) throw std::invalid_argument("KentParams: alpha must be non-negative");
    if (!(Scalar(2) * alpha < kappa)) {
      throw std::invalid_argument("KentParams: unimodality requires 2*alpha < kappa (alpha=" +
                                  std::to_string(static_cast<double>(alpha)) +
                                  ", kappa=" + std::to_string(static_cast<double>(kappa)) + ")");
    }
  }

  UnitVector<Scalar> mu_;
  UnitVector<Scalar> gamma1_;
  UnitVector<Scalar> gamma2_;
  Scalar kappa_;
  Scalar alpha_;
};

template <typename Scalar = double>
using ModelParams = std::variant<VmfParams<Scalar>, KentParams<Scalar>>;

template <typename Scalar>
const UnitVector<Scalar>& mean_direction(const ModelParams<Scalar>& params) {
  return std::visit([](const auto& p) -> const UnitVector<Scalar>& { return p.mu(); }, params);
}

template <typename Scalar>
Scalar concentration(const ModelParams<Scalar>& params) {
  return std::visit([](const auto& p) { return p.kappa(); }, params);
}

// Per-family kernels.

template <typename Scalar>
Scalar log_unnormalized_density(const VmfParams<Scalar>& p, const UnitVector<Scalar>& x) {
  return p.kappa() * p.mu().dot(x);
}

template <typename Scalar>
Scalar log_unnormalized_density(const KentParams<Scalar>& p, const UnitVector<Scalar>& x) {
  const Scalar t1 = p.gamma1().dot(x);
  const Scalar t2 = p.gamma2().dot(x);
  return p.kappa() * p.mu().dot(x) + p.alpha() * (t1 * t1 - t2 * t2);
}

template <typename Scalar>
Vec3<Scalar> score(const VmfParams<Scalar>& p, const UnitVector<Scalar>&) {
  return p.kappa() * p.mu().vec();
}

template <typename Scalar>
Vec3<Scalar> score(const KentParams<Scalar>& p, const UnitVector<Scalar>& x) {
  const Vec3<Scalar>& g1 = p.gamma1().vec();
  const Vec3<Scalar>& g2 = p.gamma2().vec();
  return p.kappa() * p.mu().vec() + Scalar(2) * p.alpha() * (g1 * g1.dot(x.vec()) - g2 * g2.dot(x.vec()));
}

template <typename Scalar>
Mat3<Scalar> score_jacobian(const VmfParams<Scalar>&, const UnitVector<Scalar>&) {
  return Mat3<Scalar>::Zero();
}

template <typename Scalar>
Mat3<Scalar> score_jacobian(const KentParams<Scalar>& p, const UnitVector<Scalar>&) {
  const Vec3<Scalar>& g1 = p.gamma1().vec();
  const Vec3<Scalar>& g2 = p.gamma2().vec();
  return Scalar(2) * p.alpha() * (g1 * g1.transpose() - g2 * g2.transpose());
}

// Variant dispatch.

template <typename Scalar>
Scalar log_unnormalized_density(const ModelParams<Scalar>& params, const UnitVector<Scalar>& x) {
  return std::visit([&](const auto& p) { return log_unnormalized_density(p, x); }, params);
}

template <typename Scalar>
Vec3<Scalar> score(const ModelParams<Scalar>& params, const UnitVector<Scalar>& x) {
  return std::visit([&](const auto& p) { return score(p, x); }, params);
}

template <typename Scalar>
Mat3<Scalar> score_jacobian(const ModelParams<Scalar>& params, const UnitVector<Scalar>& x) {
  return std::visit([&](const auto& p) { return score_jacobian(p, x); }, params);
}

/// <psi, psi>_M with psi the full model score at x.
template <typename Params, typename Scalar>
Scalar model_inner_product_term(const Params& params, const UnitVector<Scalar>& x) {
  const Vec3<Scalar> psi = score(params, x);
  return manifold_inner(x, psi, psi);
}

/// Laplace-Beltrami operator of log p at x.
template <typename Params, typename Scalar>
Scalar model_laplacian_term(const Params& params, const UnitVector<Scalar>& x) {
  return laplace_beltrami(x, score(params, x), score_jacobian(params, x));
}

}  // namespace tmsm
