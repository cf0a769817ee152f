#pragma once

// Comparison estimators: the truncation-unaware vMF maximum likelihood
// estimator, and Euclidean truncated score matching with an isotropic normal
// model in chart coordinates. Also the error metrics used by the benchmarks.

#include "tmsm/samplers.hpp"
#include "tmsm/spherical_models.hpp"

#include <span>
#include <vector>

namespace tmsm {

/// Mean resultant length of vMF(kappa) on S^2: coth(kappa) - 1/kappa.
double vmf_mean_resultant_length(double kappa);

struct KappaInversion {
  double kappa{0.0};
  bool capped{false};  // resultant too close to 1; kappa clipped to the upper bracket
};

/// Solves vmf_mean_resultant_length(kappa) = rbar by safeguarded Newton on
/// [1e-8, 1e6].
KappaInversion invert_mean_resultant_length(double rbar);

struct MleFit {
  VmfParams<double> params;
  bool kappa_capped{false};
};

/// mu = normalized resultant; kappa by inverting the mean resultant length
/// when estimate_kappa, otherwise fixed_kappa. Throws std::domain_error for
/// a zero resultant and std::invalid_argument for fewer than two points.
MleFit mle_vmf(const Dataset& data, bool estimate_kappa, double fixed_kappa = 1.0);

using ChartPoint = Eigen::Vector2d;

/// Piecewise-linear curve in the (a, b) chart plane.
struct ChartPolyline {
  std::vector<ChartPoint> vertices;
  bool closed{false};

  /// The hemisphere experiment's chart boundary: the line a = a0 plus the
  /// chart edges b = 0 and b = 2 pi, for the region a > a0.
  static ChartPolyline hemisphere_chart(double a0);
};

struct ChartDistance {
  double g{0.0};
  ChartPoint grad{ChartPoint::Zero()};
};

/// Euclidean distance from z to the polyline and its gradient.
ChartDistance chart_distance(const ChartPolyline& boundary, const ChartPoint& z);

/// Isotropic normal N(mu_z, kappa_inv I) in chart coordinates.
struct MvnChartModel {
  ChartPoint mu_z{ChartPoint::Zero()};
  double kappa_inv{1.0};

  double kappa() const { return 1.0 / kappa_inv; }
};

/// Empirical truncated score matching objective for the isotropic normal.
double truncsm_objective(const MvnChartModel& model, std::span<const ChartPoint> z,
                         std::span<const ChartDistance> g);

/// Minimizes the truncated score matching objective. With fixed precision the
/// mean solves a linear system in closed form; otherwise log kappa_inv is
/// found by golden-section search on [-6, 6] over the profiled objective.
/// Throws std::domain_error when all g(z_i) vanish.
MvnChartModel truncsm_mvn(std::span<const ChartPoint> z, const ChartPolyline& boundary, bool estimate_precision,
                          double fixed_kappa_inv = 1.0);

std::vector<ChartPoint> to_chart(const Dataset& data);

/// (1/d) |mu_hat - mu*| with d = 3 embedding coordinates.
double rmse_embedding(const UnitVec& estimate, const UnitVec& truth);

struct ErrorSummary {
  double mean{0.0};
  double sd{0.0};  // sample standard deviation (n - 1); 0 for a single value
  std::size_t count{0};
};

ErrorSummary summarize(std::span<const double> values);

/// Per-replicate rmse_embedding of each estimate against truth, summarized.
ErrorSummary rmse(std::span<const UnitVec> estimates, const UnitVec& truth);

}  // namespace tmsm
