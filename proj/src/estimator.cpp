#include "tmsm/estimator.hpp"

#include "tmsm/random.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tmsm {

namespace {

constexpr double kPi = std::numbers::pi;

// Completes mu to an orthonormal frame (u, mu, w); column 1 is mu so the
// chart point (pi/2, 0) = e2 maps to mu.
Matrix3d frame_with_mu_second(const UnitVec& mu) {
  const Vector3d& m = mu.vec();
  const Vector3d seed = std::abs(m[0]) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitZ();
  const Vector3d u = (seed - m * m.dot(seed)).normalized();
  const Vector3d w = u.cross(m);
  Matrix3d q;
  q << u, m, w;
  return q;
}

UnitVec direction_from_angles(const Matrix3d& q, double da, double db) {
  const Vector3d local(-std::sin(da), std::cos(da) * std::cos(db), std::cos(da) * std::sin(db));
  return UnitVec(Vector3d(q * local));
}

Matrix3d rotation_from_vector(const Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

UnitVec perturb(const UnitVec& mu, Rng& rng) {
  const Matrix3d q = frame_with_mu_second(mu);
  const double phi = 2.0 * kPi * rng.uniform();
  const double theta = 0.2 + 0.8 * rng.uniform();
  const Vector3d v = std::cos(theta) * q.col(1) + std::sin(theta) * (std::cos(phi) * q.col(0) + std::sin(phi) * q.col(2));
  return UnitVec(v);
}

// Banerjee et al. style approximation of the vMF concentration from the mean
// resultant length, used only for starting values.
double rough_kappa(double rbar) {
  rbar = std::clamp(rbar, 1e-3, 0.999);
  return std::clamp(rbar * (3.0 - rbar * rbar) / (1.0 - rbar * rbar), 0.1, 1e3);
}

Vector3d principal_tangent_axis(const Dataset& data, const UnitVec& mu) {
  Matrix3d scatter = Matrix3d::Zero();
  for (const UnitVec& x : data.points) scatter += x.vec() * x.vec().transpose();
  const Matrix3d p = projection(mu);
  const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(p * scatter * p);
  // Largest eigenvalue; the mu direction has eigenvalue ~0.
  return eig.eigenvectors().col(2);
}

}  // namespace

UnitVec spherical_mean(const Dataset& data) {
  Vector3d sum = Vector3d::Zero();
  for (const UnitVec& x : data.points) sum += x.vec();
  if (!(sum.norm() > 0.0)) return UnitVec(1.0, 0.0, 0.0);
  return UnitVec(sum);
}

ScaledDataset::ScaledDataset(const Dataset& data, const Boundary& boundary, const ScalingFunction& scaling) {
  if (data.empty()) throw std::invalid_argument("ScaledDataset: empty dataset");
  points_.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const UnitVec& x = data.points[i];
    const ScalingValue s = scaling(boundary, x);
    if (!s.inside) {
      throw std::domain_error("data point " + std::to_string(i) + " lies outside the observed region");
    }
    points_.push_back({x, s.g, s.grad});
    sum_g_ += s.g;
    sum_gxx_ += s.g * x.vec() * x.vec().transpose();
    sum_gx_ += s.g * x.vec();
    sum_pgrad_ += s.grad - x.vec() * x.vec().dot(s.grad);
  }
}

ObjectiveTerms tmsm_objective(const ModelParams<double>& params, const ScaledDataset& data) {
  ObjectiveTerms t;
  std::visit(
      [&](const auto& p) {
        for (const ScaledPoint& sp : data.points()) {
          const Vector3d psi = score(p, sp.x);
          t.inner_term += sp.g * manifold_inner(sp.x, psi, psi);
          t.laplacian_term += sp.g * laplace_beltrami(sp.x, psi, score_jacobian(p, sp.x));
          t.gradient_g_term += manifold_inner(sp.x, sp.grad_g, psi);
        }
      },
      params);
  const auto n = static_cast<double>(data.size());
  t.inner_term /= n;
  t.laplacian_term /= n;
  t.gradient_g_term /= n;
  t.total = t.inner_term + 2.0 * t.laplacian_term + 2.0 * t.gradient_g_term;
  return t;
}

ObjectiveTerms tmsm_objective(const ModelParams<double>& params, const Dataset& data, const Boundary& boundary,
                              const ScalingFunction& scaling) {
  return tmsm_objective(params, ScaledDataset(data, boundary, scaling));
}

ObjectiveTerms vmf_objective_from_stats(const VmfParams<double>& params, const ScaledDataset& data) {
  const Vector3d& mu = params.mu().vec();
  const double kappa = params.kappa();
  const auto n = static_cast<double>(data.size());
  ObjectiveTerms t;
  t.inner_term = kappa * kappa * (data.sum_g() - mu.dot(data.sum_gxx() * mu)) / n;
  t.laplacian_term = -2.0 * kappa * mu.dot(data.sum_gx()) / n;
  t.gradient_g_term = kappa * mu.dot(data.sum_pgrad()) / n;
  t.total = t.inner_term + 2.0 * t.laplacian_term + 2.0 * t.gradient_g_term;
  return t;
}

EstimationResult estimate(const ScaledDataset& data, ModelKind model, std::optional<KnownShape> known,
                          std::uint64_t seed, const EstimateOptions& options) {
  if ((model == ModelKind::VmfMuOnly || model == ModelKind::KentFrame) && !known) {
    throw std::invalid_argument("estimate: this model kind needs the known concentration (and ovalness)");
  }
  if (options.starts == 0) throw std::invalid_argument("estimate: at least one start is required");

  Dataset raw;
  raw.points.reserve(data.size());
  for (const ScaledPoint& p : data.points()) raw.points.push_back(p.x);
  Vector3d resultant = Vector3d::Zero();
  for (const UnitVec& x : raw.points) resultant += x.vec();
  const UnitVec mu0 = spherical_mean(raw);
  const double kappa0 = rough_kappa(resultant.norm() / static_cast<double>(raw.size()));

  constexpr double kInf = std::numeric_limits<double>::infinity();
  EstimationResult best{ModelParams<double>(VmfParams<double>(mu0, kappa0)), kInf};

  for (std::size_t k = 0; k < options.starts; ++k) {
    Rng rng(seed, k, "start");
    const UnitVec mu_start = k == 0 ? mu0 : perturb(mu0, rng);

    SimplexResult run;
    ModelParams<double> fitted = VmfParams<double>(mu_start, kappa0);
    if (model == ModelKind::KentFrame) {
      const double spin = kPi * static_cast<double>(k) / static_cast<double>(options.starts);
      Vector3d g1 = principal_tangent_axis(raw, mu_start);
      g1 = Eigen::AngleAxisd(spin, mu_start.vec()) * g1;
      const KentParams<double> start(mu_start, g1, known->kappa, known->alpha);
      const Matrix3d f0 = start.frame();
      auto build = [&](const Eigen::VectorXd& w) {
        return KentParams<double>(Matrix3d(f0 * rotation_from_vector(w.head<3>())), known->kappa, known->alpha);
      };
      const Objective f = [&](const Eigen::VectorXd& w) {
        return tmsm_objective(ModelParams<double>(build(w)), data).total;
      };
      run = minimize(f, Eigen::VectorXd::Zero(3), options.simplex);
      fitted = build(run.x);
    } else {
      const Matrix3d q = frame_with_mu_second(mu_start);
      const bool free_kappa = model == ModelKind::VmfMuKappa;
      auto build = [&](const Eigen::VectorXd& w) {
        const double kappa = free_kappa ? std::exp(w[2]) : known->kappa;
        return VmfParams<double>(direction_from_angles(q, w[0], w[1]), kappa);
      };
      const Objective f = [&](const Eigen::VectorXd& w) {
        if (free_kappa && !(std::isfinite(std::exp(w[2])) && std::exp(w[2]) > 0.0)) return kInf;
        return vmf_objective_from_stats(build(w), data).total;
      };
      Eigen::VectorXd w0 = Eigen::VectorXd::Zero(free_kappa ? 3 : 2);
      if (free_kappa) w0[2] = std::log(kappa0);
      run = minimize(f, w0, options.simplex);
      fitted = build(run.x);
    }

    best.iterations += run.iterations;
    best.evaluations += run.evaluations;
    best.restarts_used = k + 1;
    if (run.value < best.objective) {
      best.objective = run.value;
      best.params = fitted;
      best.converged = run.converged;
    }
  }
  // Report the objective of the returned parameters exactly as the public
  // objective evaluates it.
  best.objective = tmsm_objective(best.params, data).total;
  return best;
}

EstimationResult estimate(const Dataset& data, const Boundary& boundary, const ScalingFunction& scaling,
                          ModelKind model, std::optional<KnownShape> known, std::uint64_t seed,
                          const EstimateOptions& options) {
  return estimate(ScaledDataset(data, boundary, scaling), model, known, seed, options);
}

IdentityCheck ibp_identity_check(const ModelParams<double>& model, const ModelParams<double>& truth,
                                 const Boundary& boundary, const ScalingFunction& scaling,
                                 std::size_t grid_resolution) {
  if (grid_resolution < 2) throw std::invalid_argument("ibp_identity_check: grid resolution too small");
  double a_lo = 0.0, a_hi = kPi;
  if (boundary.is_colatitude()) {
    if (boundary.side() == Side::Greater) {
      a_lo = boundary.a0();
    } else {
      a_hi = boundary.a0();
    }
  }
  const auto n = static_cast<double>(grid_resolution);
  const double ha = (a_hi - a_lo) / n;
  const double hb = 2.0 * kPi / n;

  // Shift the log density by its value at the mode for numerical range.
  const double log_shift = log_unnormalized_density(truth, mean_direction(truth));

  double mass = 0.0, lhs = 0.0, rhs = 0.0, c_q = 0.0;
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    const double a = a_lo + (static_cast<double>(i) + 0.5) * ha;
    const double area = std::sin(a) * ha * hb;
    for (std::size_t j = 0; j < grid_resolution; ++j) {
      const double b = (static_cast<double>(j) + 0.5) * hb;
      const UnitVec x = to_euclidean(Spherical{a, b});
      const ScalingValue s = scaling(boundary, x);
      if (!s.inside) continue;
      const double q = std::exp(log_unnormalized_density(truth, x) - log_shift) * area;
      const Vector3d psi_q = score(truth, x);
      const Vector3d psi_p = score(model, x);
      const Vector3d diff = psi_q - psi_p;
      mass += q;
      lhs += q * s.g * manifold_inner(x, diff, diff);
      rhs += q * (s.g * manifold_inner(x, psi_p, psi_p) +
                  2.0 * s.g * laplace_beltrami(x, psi_p, score_jacobian(model, x)) +
                  2.0 * manifold_inner(x, s.grad, psi_p));
      c_q += q * s.g * manifold_inner(x, psi_q, psi_q);
    }
  }
  if (!(mass > 0.0)) throw std::domain_error("ibp_identity_check: region has no quadrature mass");
  IdentityCheck out;
  out.lhs = lhs / mass;
  out.c_q = c_q / mass;
  out.rhs = rhs / mass + out.c_q;
  out.gap = std::abs(out.lhs - out.rhs) / std::max(1.0, std::abs(out.lhs));
  return out;
}

IdentityRefinement ibp_identity_refinement(const ModelParams<double>& model, const ModelParams<double>& truth,
                                           const Boundary& boundary, const ScalingFunction& scaling,
                                           const std::vector<std::size_t>& resolutions) {
  IdentityRefinement out;
  out.resolutions = resolutions;
  for (std::size_t r : resolutions) {
    out.checks.push_back(ibp_identity_check(model, truth, boundary, scaling, r));
    const std::size_t m = out.checks.size();
    if (m >= 2 && !(out.checks[m - 1].gap < out.checks[m - 2].gap)) {
      out.decreasing = false;
      std::clog << "warning: identity gap did not decrease from resolution " << resolutions[m - 2] << " to " << r
                << " (" << out.checks[m - 2].gap << " -> " << out.checks[m - 1].gap << ")\n";
    }
  }
  return out;
}

}  // namespace tmsm
