#pragma once

// Small-dimension derivative-free minimizer: Nelder-Mead simplex search
// followed by a finite-difference Newton polish.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace tmsm {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct SimplexOptions {
  std::size_t max_evaluations{2000};
  double initial_step{0.1};
  double f_tolerance{1e-10};  // spread of objective values over the simplex
  double x_tolerance{1e-8};   // simplex diameter
  bool polish{true};
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value{0.0};
  std::size_t evaluations{0};
  std::size_t iterations{0};
  bool converged{false};
};

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2). Non-finite
/// objective values are treated as +infinity.
SimplexResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const SimplexOptions& options = {});

/// Newton steps with central-difference gradient and Hessian and a
/// backtracking line search. Only ever returns a point at least as good as x0.
SimplexResult newton_polish(const Objective& f, const Eigen::VectorXd& x0, double f0, std::size_t max_steps = 8,
                            double h = 1e-4);

/// nelder_mead followed, if enabled, by newton_polish.
SimplexResult minimize(const Objective& f, const Eigen::VectorXd& x0, const SimplexOptions& options = {});

}  // namespace tmsm
