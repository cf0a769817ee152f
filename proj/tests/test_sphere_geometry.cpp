#include "tmsm/sphere_geometry.hpp"
#include "tmsm/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tmsm;

namespace {

constexpr double kPi = std::numbers::pi;

UnitVector<double> random_point(Rng& rng) {
  // Away from the chart poles.
  const double a = 0.01 + (kPi - 0.02) * rng.uniform();
  return to_euclidean(SphericalCoord<double>{a, 2.0 * kPi * rng.uniform()});
}

}  // namespace

TEST_CASE("to_euclidean matches the chart formula") {
  CHECK((to_euclidean(SphericalCoord<double>{0.0, 0.0}).vec() - Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((to_euclidean(SphericalCoord<double>{kPi / 2, kPi}).vec() - Vector3d(0, -1, 0)).norm() < 1e-15);
  // mpmath, 30 digits
  const Vector3d expect(0.707106781186547524400844362104884, 0.353553390593273762200422181052442,
                        0.612372435695794524549321018676415);
  CHECK((to_euclidean(SphericalCoord<double>{kPi / 4, kPi / 3}).vec() - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("to_spherical inverts to_euclidean off the poles") {
  const auto pole = to_spherical(UnitVector<double>(1, 0, 0));
  CHECK(pole.a == 0.0);
  CHECK(pole.b == 0.0);
  const auto z = to_spherical(UnitVector<double>(0, -1, 0));
  CHECK(z.a == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(z.b == doctest::Approx(kPi).epsilon(1e-15));

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const SphericalCoord<double> s{0.001 + (kPi - 0.002) * rng.uniform(), 2.0 * kPi * rng.uniform()};
    const auto back = to_spherical(to_euclidean(s));
    CHECK(std::abs(back.a - s.a) < 1e-10);
    CHECK(std::abs(back.b - s.b) < 1e-10);
    const auto x = random_point(rng);
    CHECK((to_euclidean(to_spherical(x)).vec() - x.vec()).norm() < 1e-10);
  }
}

TEST_CASE("UnitVector normalizes and rejects zero") {
  const UnitVector<double> u(3.0, 4.0, 0.0);
  CHECK(std::abs(u.vec().norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(UnitVector<double>(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("projection is an orthogonal projector onto the tangent plane") {
  const Matrix3d p0 = projection(UnitVector<double>(1, 0, 0));
  CHECK((p0 - Vector3d(0, 1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_point(rng);
    const Matrix3d p = projection(x);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p * x.vec()).norm() < 1e-12);
    CHECK(std::abs(p.trace() - 2.0) < 1e-12);
    const Vector3d v(rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5);
    CHECK((p * v).norm() <= v.norm() + 1e-15);
  }
}

TEST_CASE("manifold_inner") {
  const UnitVector<double> e1(1, 0, 0);
  CHECK(manifold_inner(e1, e1.vec(), e1.vec()) == 0.0);
  CHECK(manifold_inner(e1, Vector3d(1, 1, 0), Vector3d(0, 1, 1)) == doctest::Approx(1.0));
  Rng rng(8);
  const auto x = random_point(rng);
  const Matrix3d p = projection(x);
  const Vector3d u = p * Vector3d(0.3, -0.2, 0.9), v = p * Vector3d(-0.5, 0.1, 0.4);
  CHECK(manifold_inner(x, u, v) == doctest::Approx(u.dot(v)).epsilon(1e-12));
}

TEST_CASE("laplace_beltrami against a chart finite-difference Laplacian") {
  Rng rng(11);
  const auto x0 = random_point(rng);
  CHECK(laplace_beltrami(x0, Vector3d::Zero(), Matrix3d::Zero()) == 0.0);
  CHECK(laplace_beltrami(x0, Vector3d::Zero(), Matrix3d::Identity()) == doctest::Approx(2.0).epsilon(1e-12));

  auto chart_lap = [](auto f, double a, double b) {
    const double h = 1e-4;
    const double d_a = (std::sin(a + h / 2) * (f(a + h, b) - f(a, b)) - std::sin(a - h / 2) * (f(a, b) - f(a - h, b))) /
                       (h * h * std::sin(a));
    const double d_bb = (f(a, b + h) - 2 * f(a, b) + f(a, b - h)) / (h * h);
    return d_a + d_bb / (std::sin(a) * std::sin(a));
  };
  for (int i = 0; i < 100; ++i) {
    const SphericalCoord<double> z{0.2 + (kPi - 0.4) * rng.uniform(), 2.0 * kPi * rng.uniform()};
    const auto x = to_euclidean(z);
    const Vector3d c = 5.0 * random_point(rng).vec();
    Matrix3d s = Matrix3d::Random();
    s = s + s.transpose().eval();
    // f(y) = c.y + y'Sy/2: grad = c + S y, hess = S
    auto f = [&](double a, double b) {
      const Vector3d y = to_euclidean(SphericalCoord<double>{a, b}).vec();
      return c.dot(y) + 0.5 * y.dot(s * y);
    };
    const double lb = laplace_beltrami(x, Vector3d(c + s * x.vec()), s);
    CHECK(std::abs(lb - chart_lap(f, z.a, z.b)) < 1e-4);
  }
  // Linear functions are degree-1 harmonics: eigenvalue -2.
  const Vector3d m(0.2, 0.3, -0.9);
  CHECK(laplace_beltrami(x0, m, Matrix3d::Zero()) == doctest::Approx(-2.0 * m.dot(x0.vec())));
}

TEST_CASE("geodesic_angle and rotation_between") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_point(rng), y = random_point(rng);
    CHECK(geodesic_angle(x, y) == doctest::Approx(std::acos(std::clamp(x.dot(y), -1.0, 1.0))).epsilon(1e-9));
    const Matrix3d r = rotation_between(x, y);
    CHECK((r * x.vec() - y.vec()).norm() < 1e-12);
    CHECK((r.transpose() * r - Matrix3d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("long double instantiation") {
  const auto x = to_euclidean(SphericalCoord<long double>{0.7L, 1.3L});
  CHECK(std::abs(static_cast<double>(x.vec().norm() - 1.0L)) < 1e-18);
}
