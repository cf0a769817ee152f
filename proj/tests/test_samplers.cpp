#include "tmsm/samplers.hpp"

#include <doctest.h>

#include <numbers>

using namespace tmsm;

namespace {

constexpr double kPi = std::numbers::pi;

double chi_square_critical_35() { return 57.34; }  // 0.99 quantile, 35 dof

}  // namespace

TEST_CASE("vMF mean resultant length and concentration limit") {
  for (double kappa : {1.0, 6.0, 10.0}) {
    const auto xs = sample_vmf(VmfParams<double>(UnitVec(0.1, 0.9, -0.3), kappa), 100000, 42);
    Vector3d s = Vector3d::Zero();
    for (const auto& x : xs) {
      s += x.vec();
      CHECK(std::abs(x.vec().norm() - 1.0) < 1e-12);
    }
    CHECK(std::abs(s.norm() / 1e5 - (1 / std::tanh(kappa) - 1 / kappa)) < 0.01);
  }
  const UnitVec mu(0.3, 0.3, 0.9);
  const auto tight = sample_vmf(VmfParams<double>(mu, 1e4), 1000, 1);
  Vector3d s = Vector3d::Zero();
  for (const auto& x : tight) s += x.vec();
  CHECK(geodesic_angle(UnitVec(s), mu) < 0.05);
}

TEST_CASE("vMF azimuth about the mean is uniform") {
  const UnitVec mu(0.2, -0.4, 0.8);
  const Matrix3d r = rotation_between(mu, UnitVec(1, 0, 0));
  const auto xs = sample_vmf(VmfParams<double>(mu, 6.0), 36000, 5);
  std::vector<double> bins(36, 0.0);
  for (const auto& x : xs) {
    const Spherical z = to_spherical(UnitVec(Vector3d(r * x.vec())));
    bins[std::min<std::size_t>(35, static_cast<std::size_t>(z.b / (2 * kPi) * 36))] += 1;
  }
  double chi = 0;
  for (double c : bins) chi += (c - 1000) * (c - 1000) / 1000;
  CHECK(chi < chi_square_critical_35());
}

TEST_CASE("Kent sampler") {
  const KentParams<double> k(UnitVec(0, 0, 1), Vector3d(1, 0, 0), 10.0, 3.0);
  const auto xs = sample_kent(k, 100000, 9);
  double e1 = 0, e2 = 0, em = 0;
  for (const auto& x : xs) {
    e1 += std::pow(k.gamma1().dot(x), 2);
    e2 += std::pow(k.gamma2().dot(x), 2);
    em += k.mu().dot(x);
  }
  e1 /= 1e5;
  e2 /= 1e5;
  em /= 1e5;
  CHECK(e1 > e2);
  // 400 x 400 midpoint quadrature in the Kent frame
  double mass = 0, q1 = 0, q2 = 0, qm = 0;
  for (int i = 0; i < 400; ++i) {
    const double a = (i + 0.5) * kPi / 400;
    for (int j = 0; j < 400; ++j) {
      const double b = (j + 0.5) * 2 * kPi / 400;
      const UnitVec x = to_euclidean(Spherical{a, b});
      const double w = std::exp(log_unnormalized_density(k, x) - 10.0) * std::sin(a);
      mass += w;
      q1 += w * std::pow(k.gamma1().dot(x), 2);
      q2 += w * std::pow(k.gamma2().dot(x), 2);
      qm += w * k.mu().dot(x);
    }
  }
  CHECK(std::abs(e1 - q1 / mass) < 0.01);
  CHECK(std::abs(e2 - q2 / mass) < 0.01);
  CHECK(std::abs(em - qm / mass) < 0.01);
}

TEST_CASE("Kent with alpha = 0 reproduces the vMF stream") {
  const UnitVec mu(0.5, 0.5, 0.5);
  const auto a = sample_kent(KentParams<double>(mu, Vector3d(1, 0, 0), 6.0, 0.0), 500, 17);
  const auto b = sample_vmf(VmfParams<double>(mu, 6.0), 500, 17);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].vec() == b[i].vec());
}

TEST_CASE("truncated sampling") {
  const VmfParams<double> v(to_euclidean(Spherical{2.0, kPi}), 6.0);
  const SampleRequest all{v, 300, std::nullopt, 3};
  const auto s0 = sample_truncated(all);
  CHECK(s0.raw_draws == 300);
  CHECK(s0.data.size() == 300);

  const Boundary h = Boundary::colatitude(kPi / 2);
  const auto s = sample_truncated({v, 20000, h, 4});
  for (const auto& x : s.data.points) CHECK(h.contains(x));
  // mpmath quadrature of the normalized density over a > pi/2
  CHECK(std::abs(s.observed_fraction() - 0.834217919005514794) < 0.02);

  const auto again = sample_truncated({v, 20000, h, 4});
  CHECK(again.raw_draws == s.raw_draws);
  CHECK(again.data.points.back().vec() == s.data.points.back().vec());

  const VmfParams<double> far(UnitVec(1, 0, 0), 50.0);
  CHECK_THROWS_AS(sample_truncated({far, 100, Boundary::colatitude(3.0), 1, 10}), std::runtime_error);
}
