#include "tmsm/baselines.hpp"
#include "tmsm/estimator.hpp"
#include "tmsm/random.hpp"

#include <doctest.h>

#include <numbers>

using namespace tmsm;

namespace {

constexpr double kPi = std::numbers::pi;

const Boundary& hemisphere() {
  static const Boundary b = Boundary::colatitude(kPi / 2);
  return b;
}

Dataset truncated_vmf(double kappa, std::size_t n, std::uint64_t seed) {
  return sample_truncated({VmfParams<double>(to_euclidean(Spherical{kPi / 2, kPi}), kappa), n, hemisphere(), seed}).data;
}

}  // namespace

TEST_CASE("single-point objective against a scalar transcription") {
  const VmfParams<double> p(to_euclidean(Spherical{2.0, 2.5}), 4.0);
  const Dataset one{{to_euclidean(Spherical{2.3, 3.4})}};
  const ObjectiveTerms t = tmsm_objective(p, one, hemisphere(), ScalingFunction::haversine());
  // mpmath, 30 digits
  CHECK(t.inner_term == doctest::Approx(5.97049956910619180785).epsilon(1e-12));
  CHECK(t.laplacian_term == doctest::Approx(-4.07632076048552452973).epsilon(1e-12));
  CHECK(t.gradient_g_term == doctest::Approx(-0.265100910142944758539).epsilon(1e-10));
  CHECK(t.total == doctest::Approx(-2.71234377215074676869).epsilon(1e-10));
  CHECK(t.total == t.inner_term + 2 * t.laplacian_term + 2 * t.gradient_g_term);
}

TEST_CASE("objective is the mean of single-point objectives") {
  const Dataset data = truncated_vmf(6.0, 40, 1);
  const KentParams<double> k(to_euclidean(Spherical{2.0, 3.0}), Vector3d(1, 0, 0), 8.0, 2.0);
  for (const auto& scaling : {ScalingFunction::haversine(), ScalingFunction::projected(hemisphere())}) {
    const double total = tmsm_objective(k, data, hemisphere(), scaling).total;
    double sum = 0.0;
    for (const auto& x : data.points) sum += tmsm_objective(k, Dataset{{x}}, hemisphere(), scaling).total;
    CHECK(total == doctest::Approx(sum / 40.0).epsilon(1e-12));
  }
}

TEST_CASE("g = 1 reduces to the untruncated objective") {
  const Dataset data = truncated_vmf(6.0, 100, 2);
  const VmfParams<double> p(to_euclidean(Spherical{1.8, 3.3}), 5.0);
  const ObjectiveTerms t = tmsm_objective(p, data, hemisphere(), ScalingFunction::unit());
  CHECK(t.gradient_g_term == 0.0);
  double mardia = 0.0;
  for (const auto& x : data.points) {
    mardia += model_inner_product_term(p, x) + 2.0 * model_laplacian_term(p, x);
  }
  CHECK(t.total == doctest::Approx(mardia / 100.0).epsilon(1e-12));
}

TEST_CASE("sufficient-statistic fast path equals the per-point objective") {
  const Dataset data = truncated_vmf(6.0, 200, 3);
  Rng rng(3);
  for (const auto& scaling : {ScalingFunction::haversine(), ScalingFunction::projected(hemisphere())}) {
    const ScaledDataset s(data, hemisphere(), scaling);
    for (int i = 0; i < 20; ++i) {
      const VmfParams<double> p(to_euclidean(Spherical{kPi * rng.uniform(), 2 * kPi * rng.uniform()}),
                                0.1 + 20 * rng.uniform());
      CHECK(vmf_objective_from_stats(p, s).total == doctest::Approx(tmsm_objective(p, s).total).epsilon(1e-10));
    }
  }
}

TEST_CASE("points outside the region are rejected") {
  const Dataset bad{{UnitVec(1, 0, 0)}};
  CHECK_THROWS_AS(ScaledDataset(bad, hemisphere(), ScalingFunction::haversine()), std::domain_error);
}

TEST_CASE("estimate recovers the truncated vMF mean direction") {
  const UnitVec truth = to_euclidean(Spherical{kPi / 2, kPi});
  int within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = truncated_vmf(6.0, 1000, 100 + seed);
    const auto r = estimate(data, hemisphere(), ScalingFunction::haversine(), ModelKind::VmfMuOnly,
                            KnownShape{6.0, 0.0}, seed);
    if (geodesic_angle(mean_direction(r.params), truth) < 0.15) ++within;
    CHECK(r.objective ==
          doctest::Approx(tmsm_objective(r.params, data, hemisphere(), ScalingFunction::haversine()).total).epsilon(1e-9));
  }
  CHECK(within >= 18);
}

TEST_CASE("estimate with kappa and Kent frame") {
  const Dataset data = truncated_vmf(6.0, 2000, 7);
  const auto r = estimate(data, hemisphere(), ScalingFunction::haversine(), ModelKind::VmfMuKappa, std::nullopt, 1);
  CHECK(std::abs(concentration(r.params) - 6.0) < 1.0);
  CHECK_THROWS_AS(estimate(data, hemisphere(), ScalingFunction::haversine(), ModelKind::KentFrame, std::nullopt, 1),
                  std::invalid_argument);

  const KentParams<double> kent(to_euclidean(Spherical{kPi / 2, kPi}), Vector3d(1, 0, 0), 10.0, 3.0);
  const Dataset kd = sample_truncated({kent, 1000, hemisphere(), 8}).data;
  const auto rk = estimate(kd, hemisphere(), ScalingFunction::haversine(), ModelKind::KentFrame, KnownShape{10.0, 3.0}, 2);
  const auto mle = mle_vmf(kd, false);
  CHECK(geodesic_angle(mean_direction(rk.params), kent.mu()) < geodesic_angle(mle.params.mu(), kent.mu()));
}

TEST_CASE("g = 1 estimate matches the untruncated objective minimizer") {
  const Dataset data{sample_vmf(VmfParams<double>(UnitVec(-0.6, 0.2, 0.3), 5.0), 500, 4)};
  const Boundary whole = Boundary::colatitude(1e-3);
  Dataset inside;
  for (const auto& x : data.points) {
    if (whole.contains(x)) inside.points.push_back(x);
  }
  const auto r = estimate(inside, whole, ScalingFunction::unit(), ModelKind::VmfMuOnly, KnownShape{5.0, 0.0}, 0);
  // Brute-force search over a 0.25 degree grid.
  const ScaledDataset scaled(inside, whole, ScalingFunction::unit());
  double best = 1e300;
  UnitVec arg;
  for (int i = 0; i <= 720; ++i) {
    for (int j = 0; j < 720; ++j) {
      const UnitVec m = to_euclidean(Spherical{kPi * i / 720.0, 2 * kPi * j / 720.0});
      const double v = vmf_objective_from_stats(VmfParams<double>(m, 5.0), scaled).total;
      if (v < best) {
        best = v;
        arg = m;
      }
    }
  }
  CHECK(r.objective <= best + 1e-12);
  CHECK(geodesic_angle(mean_direction(r.params), arg) < 0.01);
}

TEST_CASE("estimate is seed-deterministic") {
  const Dataset data = truncated_vmf(6.0, 300, 9);
  const auto a = estimate(data, hemisphere(), ScalingFunction::projected(hemisphere()), ModelKind::VmfMuKappa, std::nullopt, 5);
  const auto b = estimate(data, hemisphere(), ScalingFunction::projected(hemisphere()), ModelKind::VmfMuKappa, std::nullopt, 5);
  CHECK(mean_direction(a.params).vec() == mean_direction(b.params).vec());
  CHECK(a.objective == b.objective);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("integration-by-parts identity") {
  const VmfParams<double> q(to_euclidean(Spherical{kPi / 2, kPi}), 6.0);
  const auto same = ibp_identity_check(q, q, hemisphere(), ScalingFunction::haversine(), 200);
  CHECK(std::abs(same.lhs) < 1e-12);
  CHECK(std::abs(same.rhs) < 1e-3);
  CHECK(same.gap < 1e-3);

  const VmfParams<double> p(to_euclidean(Spherical{2.0, 2.7}), 3.5);
  const auto good = ibp_identity_check(p, q, hemisphere(), ScalingFunction::haversine(), 400);
  CHECK(good.gap < 1e-3);
  const auto proj = ibp_identity_check(p, q, hemisphere(), ScalingFunction::projected(hemisphere()), 400);
  CHECK(proj.gap < 1e-3);
  const auto unit = ibp_identity_check(p, q, hemisphere(), ScalingFunction::unit(), 400);
  CHECK(unit.gap > 10 * good.gap);

  const auto refine = ibp_identity_refinement(p, q, hemisphere(), ScalingFunction::haversine(), {50, 100, 200});
  CHECK(refine.decreasing);
}

TEST_CASE("identity on a polyline region") {
  const std::vector<UnitVec> v{to_euclidean(Spherical{1.2, 0.4}), to_euclidean(Spherical{1.2, 1.4}),
                               to_euclidean(Spherical{0.5, 0.9})};
  const Boundary tri = Boundary::polyline(v, 1024);
  const VmfParams<double> q(to_euclidean(Spherical{0.8, 0.6}), 4.0), p(to_euclidean(Spherical{0.9, 1.0}), 2.0);
  const auto c = ibp_identity_check(p, q, tri, ScalingFunction::haversine(), 400);
  CHECK(c.gap < 1e-2);
}

TEST_CASE("median geodesic error is non-increasing in n") {
  const UnitVec truth = to_euclidean(Spherical{kPi / 2, kPi});
  double previous = 1e9;
  for (std::size_t n : {125u, 250u, 500u, 1000u, 2000u}) {
    std::vector<double> errs;
    for (std::uint64_t r = 0; r < 64; ++r) {
      const Dataset d = truncated_vmf(6.0, n, derive_seed(77, n * 1000 + r, "median"));
      const ScaledDataset s(d, hemisphere(), ScalingFunction::haversine());
      EstimateOptions opts;
      opts.starts = 2;
      errs.push_back(geodesic_angle(mean_direction(estimate(s, ModelKind::VmfMuOnly, KnownShape{6.0, 0.0}, r, opts).params), truth));
    }
    std::nth_element(errs.begin(), errs.begin() + 32, errs.end());
    CHECK(errs[32] <= previous);
    previous = errs[32];
  }
}
