#include "tmsm/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tmsm {

namespace {

constexpr std::size_t kPilotProposals = 10000;
constexpr double kMinAcceptance = 1e-3;

Matrix3d frame_about(const UnitVec& mu) {
  const Vector3d& m = mu.vec();
  const Vector3d seed = std::abs(m[0]) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY();
  const Vector3d t1 = (seed - m * m.dot(seed)).normalized();
  const Vector3d t2 = m.cross(t1);
  Matrix3d f;
  f << t1, t2, m;
  return f;
}

}  // namespace

VmfSampler::VmfSampler(const VmfParams<double>& params, Rng rng)
    : kappa_(params.kappa()), frame_(frame_about(params.mu())), rng_(rng) {}

UnitVec VmfSampler::draw() {
  // v in (0, 1] keeps the logarithm finite for very large kappa.
  const double v = 1.0 - rng_.uniform();
  double w = 1.0 + std::log(v + (1.0 - v) * std::exp(-2.0 * kappa_)) / kappa_;
  w = std::clamp(w, -1.0, 1.0);
  const double phi = 2.0 * std::numbers::pi * rng_.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - w * w));
  const Vector3d local(r * std::cos(phi), r * std::sin(phi), w);
  return UnitVec(Vector3d(frame_ * local));
}

KentSampler::KentSampler(const KentParams<double>& params, Rng proposal_rng, Rng accept_rng)
    : params_(params),
      proposal_(VmfParams<double>(params.mu(), params.kappa()), proposal_rng),
      accept_rng_(accept_rng) {}

UnitVec KentSampler::draw() {
  const double alpha = params_.alpha();
  for (std::size_t local = 1;; ++local) {
    const UnitVec x = proposal_.draw();
    ++proposals_;
    const double t1 = params_.gamma1().dot(x);
    const double t2 = params_.gamma2().dot(x);
    // alpha (t1^2 - t2^2) <= alpha on the sphere, so this is a probability.
    const double log_accept = alpha * (t1 * t1 - t2 * t2) - alpha;
    if (accept_rng_.uniform() < std::exp(log_accept)) return x;
    if (static_cast<double>(local) * kMinAcceptance > static_cast<double>(kPilotProposals)) {
      throw std::runtime_error("Kent sampler: no acceptance in " + std::to_string(local) + " proposals");
    }
  }
}

std::vector<UnitVec> sample_vmf(const VmfParams<double>& params, std::size_t n, std::uint64_t seed) {
  VmfSampler sampler(params, Rng(seed, 0, "proposal"));
  std::vector<UnitVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw());
  return out;
}

std::vector<UnitVec> sample_kent(const KentParams<double>& params, std::size_t n, std::uint64_t seed) {
  KentSampler sampler(params, Rng(seed, 0, "proposal"), Rng(seed, 0, "accept"));
  std::vector<UnitVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(sampler.draw());
    if (sampler.proposals() >= kPilotProposals &&
        static_cast<double>(out.size()) < kMinAcceptance * static_cast<double>(sampler.proposals())) {
      throw std::runtime_error("Kent sampler: acceptance rate below " + std::to_string(kMinAcceptance) +
                               " over the pilot batch");
    }
  }
  return out;
}

TruncatedSample sample_truncated(const SampleRequest& request) {
  if (request.n_observed == 0) throw std::invalid_argument("sample_truncated: n_observed must be positive");
  const std::size_t cap = request.max_draw_factor * request.n_observed;

  auto run = [&](auto& sampler) {
    TruncatedSample out;
    out.data.points.reserve(request.n_observed);
    while (out.data.size() < request.n_observed) {
      if (out.raw_draws >= cap) {
        throw std::runtime_error("sample_truncated: region mass too small, " + std::to_string(out.data.size()) +
                                 " of " + std::to_string(request.n_observed) + " points after " +
                                 std::to_string(out.raw_draws) + " draws");
      }
      const UnitVec x = sampler.draw();
      ++out.raw_draws;
      if (!request.region || request.region->contains(x)) out.data.points.push_back(x);
    }
    return out;
  };

  if (const auto* vmf = std::get_if<VmfParams<double>>(&request.params)) {
    VmfSampler sampler(*vmf, Rng(request.seed, 0, "proposal"));
    return run(sampler);
  }
  KentSampler sampler(std::get<KentParams<double>>(request.params), Rng(request.seed, 0, "proposal"),
                      Rng(request.seed, 0, "accept"));
  return run(sampler);
}

}  // namespace tmsm
