#pragma once

#include "tmsm/boundary_scaling.hpp"
#include "tmsm/random.hpp"
#include "tmsm/spherical_models.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace tmsm {

struct Dataset {
  std::vector<UnitVec> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Exact vMF sampler on S^2: w = mu^T x is drawn by inverting its CDF,
/// the azimuth about mu is uniform.
class VmfSampler {
 public:
  VmfSampler(const VmfParams<double>& params, Rng rng);
  UnitVec draw();

 private:
  double kappa_;
  Matrix3d frame_;  // columns: two tangent axes, then mu
  Rng rng_;
};

/// Kent sampler by rejection from the vMF(mu, kappa) envelope. Proposals
/// and acceptance uniforms come from separate streams.
class KentSampler {
 public:
  KentSampler(const KentParams<double>& params, Rng proposal_rng, Rng accept_rng);
  UnitVec draw();
  std::size_t proposals() const { return proposals_; }

 private:
  KentParams<double> params_;
  VmfSampler proposal_;
  Rng accept_rng_;
  std::size_t proposals_{0};
};

std::vector<UnitVec> sample_vmf(const VmfParams<double>& params, std::size_t n, std::uint64_t seed);

/// Throws std::runtime_error when the acceptance rate over a pilot batch
/// falls below 1e-3.
std::vector<UnitVec> sample_kent(const KentParams<double>& params, std::size_t n, std::uint64_t seed);

struct SampleRequest {
  ModelParams<double> params;
  std::size_t n_observed{0};
  std::optional<Boundary> region;  // nullopt: the whole sphere is observed
  std::uint64_t seed{0};
  std::size_t max_draw_factor{1000};
};

struct TruncatedSample {
  Dataset data;
  std::size_t raw_draws{0};

  double observed_fraction() const {
    return raw_draws == 0 ? 0.0 : static_cast<double>(data.size()) / static_cast<double>(raw_draws);
  }
};

/// Draws from the full model and keeps the points inside the region until
/// n_observed are collected. Throws std::runtime_error when more than
/// max_draw_factor * n_observed raw draws would be needed.
TruncatedSample sample_truncated(const SampleRequest& request);

}  // namespace tmsm
