#pragma once

// Truncated manifold score matching: the empirical objective
//
//   J(beta) = 1/n sum g_i <psi_i, psi_i>_M + 2/n sum g_i Lap_M log p(x_i)
//           + 2/n sum <grad g_i, psi_i>_M
//
// its minimization, and a quadrature witness of the integration-by-parts
// identity it rests on.

#include "tmsm/boundary_scaling.hpp"
#include "tmsm/optimizer.hpp"
#include "tmsm/samplers.hpp"
#include "tmsm/spherical_models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tmsm {

struct ObjectiveTerms {
  double inner_term{0.0};
  double laplacian_term{0.0};
  double gradient_g_term{0.0};
  double total{0.0};
};

struct ScaledPoint {
  UnitVec x;
  double g{0.0};
  Vector3d grad_g{Vector3d::Zero()};
};

/// Data together with g(x_i) and grad g(x_i). g does not depend on the model
/// parameters, so it is evaluated once per dataset.
class ScaledDataset {
 public:
  /// Throws std::domain_error if any point lies outside the region.
  ScaledDataset(const Dataset& data, const Boundary& boundary, const ScalingFunction& scaling);

  std::span<const ScaledPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  /// Sufficient statistics of the vMF objective:
  /// sum g, sum g x x^T, sum g x, sum P grad g.
  double sum_g() const { return sum_g_; }
  const Matrix3d& sum_gxx() const { return sum_gxx_; }
  const Vector3d& sum_gx() const { return sum_gx_; }
  const Vector3d& sum_pgrad() const { return sum_pgrad_; }

 private:
  std::vector<ScaledPoint> points_;
  double sum_g_{0.0};
  Matrix3d sum_gxx_{Matrix3d::Zero()};
  Vector3d sum_gx_{Vector3d::Zero()};
  Vector3d sum_pgrad_{Vector3d::Zero()};
};

ObjectiveTerms tmsm_objective(const ModelParams<double>& params, const ScaledDataset& data);
ObjectiveTerms tmsm_objective(const ModelParams<double>& params, const Dataset& data, const Boundary& boundary,
                              const ScalingFunction& scaling);

/// Closed form of the vMF objective through the sufficient statistics; equal
/// to tmsm_objective up to rounding.
ObjectiveTerms vmf_objective_from_stats(const VmfParams<double>& params, const ScaledDataset& data);

enum class ModelKind { VmfMuOnly, VmfMuKappa, KentFrame };

/// Parameters held fixed during estimation.
struct KnownShape {
  double kappa{1.0};
  double alpha{0.0};
};

struct EstimateOptions {
  std::size_t starts{8};
  SimplexOptions simplex{};
};

struct EstimationResult {
  ModelParams<double> params;
  double objective{0.0};
  std::size_t iterations{0};
  std::size_t evaluations{0};
  bool converged{false};
  std::size_t restarts_used{0};
};

/// Multi-start minimization of the objective. Deterministic for a given
/// seed. Throws std::invalid_argument if `model` needs a known shape that
/// was not supplied.
EstimationResult estimate(const ScaledDataset& data, ModelKind model, std::optional<KnownShape> known,
                          std::uint64_t seed, const EstimateOptions& options = {});
EstimationResult estimate(const Dataset& data, const Boundary& boundary, const ScalingFunction& scaling,
                          ModelKind model, std::optional<KnownShape> known, std::uint64_t seed,
                          const EstimateOptions& options = {});

struct IdentityCheck {
  double lhs{0.0};  // integral of q g |psi_q - psi_p|^2_M
  double rhs{0.0};  // tractable three-term form plus C_q
  double c_q{0.0};
  double gap{0.0};  // |lhs - rhs| / max(1, |lhs|)
};

/// Midpoint quadrature on an N x N grid of the (a, b) chart with the sin a
/// area element, over the observed region, with q the normalized truncation
/// of `truth`. Exact band integration for colatitude boundaries; polyline
/// regions are masked on a whole-sphere grid.
IdentityCheck ibp_identity_check(const ModelParams<double>& model, const ModelParams<double>& truth,
                                 const Boundary& boundary, const ScalingFunction& scaling,
                                 std::size_t grid_resolution);

struct IdentityRefinement {
  std::vector<std::size_t> resolutions;
  std::vector<IdentityCheck> checks;
  bool decreasing{true};
};

/// Runs the check at each resolution; warns on std::clog when the gap does
/// not decrease under refinement.
IdentityRefinement ibp_identity_refinement(const ModelParams<double>& model, const ModelParams<double>& truth,
                                           const Boundary& boundary, const ScalingFunction& scaling,
                                           const std::vector<std::size_t>& resolutions);

/// Normalized resultant direction of the data, or +x1 for a zero resultant.
UnitVec spherical_mean(const Dataset& data);

}  // namespace tmsm
