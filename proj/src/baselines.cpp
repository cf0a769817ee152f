#include "tmsm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tmsm {

namespace {

constexpr double kKappaLow = 1e-8;
constexpr double kKappaHigh = 1e6;

}  // namespace

double vmf_mean_resultant_length(double kappa) {
  if (kappa < 1e-3) {
    // coth k - 1/k = k/3 - k^3/45 + ...
    return kappa / 3.0 - kappa * kappa * kappa / 45.0;
  }
  return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

KappaInversion invert_mean_resultant_length(double rbar) {
  if (!(rbar > 0.0)) return {kKappaLow, false};
  if (rbar >= vmf_mean_resultant_length(kKappaHigh)) return {kKappaHigh, true};

  double lo = kKappaLow, hi = kKappaHigh;
  double k = std::clamp(rbar * (3.0 - rbar * rbar) / (1.0 - rbar * rbar), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = vmf_mean_resultant_length(k) - rbar;
    if (f > 0.0) hi = k; else lo = k;
    // A'(k) = 1/k^2 - 1/sinh^2(k)
    const double sh = std::sinh(k);
    const double deriv = k < 1e-3 ? 1.0 / 3.0 : 1.0 / (k * k) - (std::isfinite(sh) ? 1.0 / (sh * sh) : 0.0);
    double next = k - f / deriv;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - k) <= 1e-10 * std::max(1.0, k)) {
      k = next;
      break;
    }
    k = next;
  }
  return {k, false};
}

MleFit mle_vmf(const Dataset& data, bool estimate_kappa, double fixed_kappa) {
  if (data.size() < 2) throw std::invalid_argument("mle_vmf: need at least two points");
  Vector3d sum = Vector3d::Zero();
  for (const UnitVec& x : data.points) sum += x.vec();
  const double r = sum.norm();
  if (!(r > 1e-12 * static_cast<double>(data.size()))) {
    throw std::domain_error("mle_vmf: zero resultant, mean direction undefined");
  }
  const UnitVec mu(sum);
  if (!estimate_kappa) return {VmfParams<double>(mu, fixed_kappa), false};
  const KappaInversion inv = invert_mean_resultant_length(r / static_cast<double>(data.size()));
  return {VmfParams<double>(mu, inv.kappa), inv.capped};
}

ChartPolyline ChartPolyline::hemisphere_chart(double a0) {
  const double pi = std::numbers::pi;
  return {{ChartPoint(pi, 0.0), ChartPoint(a0, 0.0), ChartPoint(a0, 2.0 * pi), ChartPoint(pi, 2.0 * pi)}, false};
}

ChartDistance chart_distance(const ChartPolyline& boundary, const ChartPoint& z) {
  const auto& v = boundary.vertices;
  if (v.size() < 2) throw std::invalid_argument("chart_distance: polyline needs two vertices");
  const std::size_t segments = boundary.closed ? v.size() : v.size() - 1;
  double best = std::numeric_limits<double>::infinity();
  ChartPoint nearest = v.front();
  for (std::size_t i = 0; i < segments; ++i) {
    const ChartPoint& p = v[i];
    const ChartPoint& q = v[(i + 1) % v.size()];
    const ChartPoint d = q - p;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((z - p).dot(d) / len2, 0.0, 1.0) : 0.0;
    const ChartPoint c = p + t * d;
    const double dist = (z - c).norm();
    if (dist < best) {
      best = dist;
      nearest = c;
    }
  }
  ChartDistance out;
  out.g = best;
  if (best > 0.0) out.grad = (z - nearest) / best;
  return out;
}

std::vector<ChartPoint> to_chart(const Dataset& data) {
  std::vector<ChartPoint> out;
  out.reserve(data.size());
  for (const UnitVec& x : data.points) {
    const Spherical s = to_spherical(x);
    out.emplace_back(s.a, s.b);
  }
  return out;
}

double truncsm_objective(const MvnChartModel& model, std::span<const ChartPoint> z,
                         std::span<const ChartDistance> g) {
  // psi = -(z - mu) / kappa_inv, tr(grad psi) = -2 / kappa_inv
  const double lambda = 1.0 / model.kappa_inv;
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const ChartPoint psi = -lambda * (z[i] - model.mu_z);
    total += g[i].g * (psi.squaredNorm() - 4.0 * lambda) + 2.0 * g[i].grad.dot(psi);
  }
  return total / static_cast<double>(z.size());
}

namespace {

// For fixed lambda the objective is quadratic in mu with stationary point
// mu * sum g = sum g z - (1/lambda) sum grad g.
ChartPoint truncsm_mean(std::span<const ChartPoint> z, std::span<const ChartDistance> g, double kappa_inv) {
  double sum_g = 0.0;
  ChartPoint sum_gz = ChartPoint::Zero(), sum_grad = ChartPoint::Zero();
  for (std::size_t i = 0; i < z.size(); ++i) {
    sum_g += g[i].g;
    sum_gz += g[i].g * z[i];
    sum_grad += g[i].grad;
  }
  if (!(sum_g > 0.0)) throw std::domain_error("truncsm_mvn: singular normal equations (all g vanish)");
  return (sum_gz - kappa_inv * sum_grad) / sum_g;
}

}  // namespace

MvnChartModel truncsm_mvn(std::span<const ChartPoint> z, const ChartPolyline& boundary, bool estimate_precision,
                          double fixed_kappa_inv) {
  if (z.empty()) throw std::invalid_argument("truncsm_mvn: empty data");
  std::vector<ChartDistance> g;
  g.reserve(z.size());
  for (const ChartPoint& p : z) g.push_back(chart_distance(boundary, p));

  if (!estimate_precision) {
    if (!(fixed_kappa_inv > 0.0)) throw std::invalid_argument("truncsm_mvn: kappa_inv must be positive");
    return {truncsm_mean(z, g, fixed_kappa_inv), fixed_kappa_inv};
  }

  auto profile = [&](double log_kappa_inv) {
    const double kinv = std::exp(log_kappa_inv);
    return truncsm_objective({truncsm_mean(z, g, kinv), kinv}, z, g);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -6.0, hi = 6.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = profile(c), fd = profile(d);
  while (hi - lo > 1e-10) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = profile(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = profile(d);
    }
  }
  const double kinv = std::exp(0.5 * (lo + hi));
  return {truncsm_mean(z, g, kinv), kinv};
}

double rmse_embedding(const UnitVec& estimate, const UnitVec& truth) {
  return (estimate.vec() - truth.vec()).norm() / 3.0;
}

ErrorSummary summarize(std::span<const double> values) {
  ErrorSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

ErrorSummary rmse(std::span<const UnitVec> estimates, const UnitVec& truth) {
  std::vector<double> errors;
  errors.reserve(estimates.size());
  for (const UnitVec& e : estimates) errors.push_back(rmse_embedding(e, truth));
  return summarize(errors);
}

}  // namespace tmsm
