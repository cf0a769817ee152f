#include "tmsm/optimizer.hpp"

#include <doctest.h>

#include <cmath>

using namespace tmsm;

TEST_CASE("Nelder-Mead minimizes a shifted quadratic") {
  const Eigen::Vector3d target(0.5, -1.0, 2.0);
  auto f = [&](const Eigen::VectorXd& x) { return (x - target).squaredNorm() + 3.0; };
  const auto r = minimize(f, Eigen::VectorXd::Zero(3));
  CHECK(r.converged);
  CHECK((r.x - target).norm() < 1e-6);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.evaluations <= 2000 + 64);
}

TEST_CASE("Rosenbrock") {
  auto f = [](const Eigen::VectorXd& x) { return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2); };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r = minimize(f, x0);
  CHECK((r.x - Eigen::Vector2d(1, 1)).norm() < 1e-5);
}

TEST_CASE("evaluation budget is respected and flagged") {
  SimplexOptions opts;
  opts.max_evaluations = 30;
  opts.polish = false;
  auto f = [](const Eigen::VectorXd& x) { return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2); };
  const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), opts);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 30);
}

TEST_CASE("Newton polish never increases the value") {
  auto f = [](const Eigen::VectorXd& x) { return std::cosh(x[0] - 0.3) + std::pow(x[1] + 0.2, 4) + x[1] * x[1]; };
  const Eigen::VectorXd x0 = Eigen::Vector2d(0.25, -0.1);
  const auto r = newton_polish(f, x0, f(x0));
  CHECK(r.value <= f(x0));
  CHECK(std::abs(r.x[0] - 0.3) < 1e-6);
}

TEST_CASE("deterministic") {
  auto f = [](const Eigen::VectorXd& x) { return std::sin(3 * x[0]) + x.squaredNorm(); };
  const auto a = minimize(f, Eigen::Vector2d(1, 1));
  const auto b = minimize(f, Eigen::Vector2d(1, 1));
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
}
