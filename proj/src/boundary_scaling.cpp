#include "tmsm/boundary_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tmsm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleGuard = 1e-6;

UnitVec slerp(const UnitVec& p, const UnitVec& q, double t) {
  const double omega = geodesic_angle(p, q);
  if (omega < 1e-15) return p;
  const double s = std::sin(omega);
  return UnitVec(Vector3d((std::sin((1.0 - t) * omega) / s) * p.vec() + (std::sin(t * omega) / s) * q.vec()));
}

// Orthonormal basis (e, f) of the tangent plane at c, used for the gnomonic
// membership test.
std::pair<Vector3d, Vector3d> tangent_basis(const UnitVec& c) {
  const Vector3d& n = c.vec();
  Vector3d seed = std::abs(n[0]) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY();
  Vector3d e = (seed - n * n.dot(seed)).normalized();
  Vector3d f = n.cross(e);
  return {e, f};
}

Eigen::Vector2d gnomonic(const UnitVec& c, const Vector3d& e, const Vector3d& f, const UnitVec& x) {
  const double d = c.dot(x);
  return Eigen::Vector2d(x.vec().dot(e) / d, x.vec().dot(f) / d);
}

// Ambient gradient of the great-circle distance from x to the fixed point xp,
// computed through the chart by the chain rule. Near the chart poles the
// computation is carried out in a rotated frame where x sits on the equator.
Vector3d haversine_ambient_gradient(const UnitVec& x, const UnitVec& xp) {
  const Spherical z = to_spherical(x);
  if (std::sin(z.a) >= kPoleGuard) {
    const Eigen::Vector2d dz = haversine_gradient(z, to_spherical(xp));
    return chart_jacobian(x).transpose() * dz;
  }
  const Matrix3d r = rotation_between(x, UnitVec(0.0, 1.0, 0.0));
  const UnitVec xr(Vector3d(r * x.vec()));
  const UnitVec xpr(Vector3d(r * xp.vec()));
  const Eigen::Vector2d dz = haversine_gradient(to_spherical(xr), to_spherical(xpr));
  const Vector3d grad_r = chart_jacobian(xr).transpose() * dz;
  return r.transpose() * grad_r;
}

Eigen::Vector2d drop(const Vector3d& v, int axis) {
  switch (axis) {
    case 0: return {v[1], v[2]};
    case 1: return {v[0], v[2]};
    default: return {v[0], v[1]};
  }
}

Vector3d lift(const Eigen::Vector2d& v, int axis) {
  switch (axis) {
    case 0: return {0.0, v[0], v[1]};
    case 1: return {v[0], 0.0, v[1]};
    default: return {v[0], v[1], 0.0};
  }
}

void check_axis(int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("drop_axis must be 0, 1 or 2");
}

}  // namespace

Boundary Boundary::colatitude(double a0, Side side, std::size_t resolution) {
  if (!(a0 > 0.0 && a0 < kPi)) throw std::invalid_argument("colatitude boundary requires a0 in (0, pi)");
  if (resolution < 3) throw std::invalid_argument("boundary resolution must be at least 3");
  Boundary b;
  b.a0_ = a0;
  b.side_ = side;
  b.samples_.reserve(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    b.samples_.push_back(to_euclidean(Spherical{a0, 2.0 * kPi * static_cast<double>(k) / resolution}));
  }
  b.spacing_ = 2.0 * std::asin(std::sin(a0) * std::sin(kPi / resolution));
  b.finalize();
  return b;
}

Boundary Boundary::polyline(std::vector<UnitVec> vertices, std::size_t resolution) {
  const std::size_t nv = vertices.size();
  if (nv < 3) throw std::invalid_argument("polyline boundary needs at least 3 vertices");
  if (resolution < nv) resolution = nv;
  std::vector<double> lengths(nv);
  double total = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    lengths[i] = geodesic_angle(vertices[i], vertices[(i + 1) % nv]);
    if (!(lengths[i] > 1e-12)) {
      throw std::invalid_argument("polyline boundary has repeated consecutive vertices at index " +
                                  std::to_string(i));
    }
    total += lengths[i];
  }
  Boundary b;
  b.samples_.reserve(resolution + nv);
  double spacing = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const auto pieces = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(resolution) * lengths[i] / total)));
    for (std::size_t j = 0; j < pieces; ++j) {
      b.samples_.push_back(slerp(vertices[i], vertices[(i + 1) % nv], static_cast<double>(j) / pieces));
    }
    spacing = std::max(spacing, lengths[i] / pieces);
  }
  b.spacing_ = spacing;
  b.vertices_ = std::move(vertices);
  b.finalize();
  return b;
}

void Boundary::finalize() {
  if (is_colatitude()) {
    centroid_ = side_ == Side::Greater ? UnitVec(-1.0, 0.0, 0.0) : UnitVec(1.0, 0.0, 0.0);
    // A cap is inside one x1-hemisphere only when it does not cross the
    // equator; the other axes always fold it.
    const bool x1_ok = side_ == Side::Greater ? a0_ >= kPi / 2 - 1e-12 : a0_ <= kPi / 2 + 1e-12;
    folds_ = {!x1_ok, true, true};
    return;
  }
  Vector3d sum = Vector3d::Zero();
  for (const UnitVec& s : samples_) sum += s.vec();
  centroid_ = UnitVec(sum);
  for (const UnitVec& v : *vertices_) {
    if (centroid_.dot(v) < 1e-3) {
      throw std::invalid_argument("polyline boundary must lie inside an open hemisphere");
    }
  }
  std::tie(gnomonic_e_, gnomonic_f_) = tangent_basis(centroid_);
  gnomonic_vertices_.clear();
  for (const UnitVec& v : *vertices_) gnomonic_vertices_.push_back(gnomonic(centroid_, gnomonic_e_, gnomonic_f_, v));
  for (int axis = 0; axis < 3; ++axis) {
    const double side = centroid_[axis] >= 0.0 ? 1.0 : -1.0;
    folds_[static_cast<std::size_t>(axis)] = std::any_of(
        samples_.begin(), samples_.end(), [&](const UnitVec& s) { return side * s[axis] < -1e-12; });
  }
}

std::span<const UnitVec> Boundary::vertices() const {
  if (!vertices_) return {};
  return *vertices_;
}

bool Boundary::contains(const UnitVec& x) const {
  if (is_colatitude()) {
    const double a = to_spherical(x).a;
    return side_ == Side::Greater ? a > a0_ : a < a0_;
  }
  // The polygon lies in the open hemisphere around the centroid, where
  // geodesic edges become straight segments under the gnomonic projection.
  if (centroid_.dot(x) <= 0.0) return false;
  const Eigen::Vector2d p = gnomonic(centroid_, gnomonic_e_, gnomonic_f_, x);
  const auto& vs = gnomonic_vertices_;
  bool inside = false;
  for (std::size_t i = 0, j = vs.size() - 1; i < vs.size(); j = i++) {
    if ((vs[i].y() > p.y()) != (vs[j].y() > p.y())) {
      const double xcross = vs[i].x() + (p.y() - vs[i].y()) * (vs[j].x() - vs[i].x()) / (vs[j].y() - vs[i].y());
      if (p.x() < xcross) inside = !inside;
    }
  }
  return inside;
}

double haversine_distance(const Spherical& z, const Spherical& zp) {
  const double sa = std::sin((zp.a - z.a) / 2.0);
  const double sb = std::sin((zp.b - z.b) / 2.0);
  // With a measured from the pole the latitude cosine is sin a.
  double u = sa * sa + std::sin(z.a) * std::sin(zp.a) * sb * sb;
  u = std::clamp(u, 0.0, 1.0);
  return 2.0 * std::asin(std::sqrt(u));
}

Eigen::Vector2d haversine_gradient(const Spherical& z, const Spherical& zp) {
  const double sa = std::sin((zp.a - z.a) / 2.0);
  const double sb = std::sin((zp.b - z.b) / 2.0);
  const double s_sq = sb * sb;
  const double u = std::clamp(sa * sa + std::sin(z.a) * std::sin(zp.a) * s_sq, 0.0, 1.0);
  const double denom = std::sqrt(u * (1.0 - u));
  if (!(denom > 0.0)) return Eigen::Vector2d::Zero();
  const double du_da = -0.5 * std::sin(zp.a - z.a) + std::cos(z.a) * std::sin(zp.a) * s_sq;
  const double du_db = -0.5 * std::sin(z.a) * std::sin(zp.a) * std::sin(zp.b - z.b);
  return Eigen::Vector2d(du_da, du_db) / denom;
}

std::size_t nearest_boundary_index(const Boundary& boundary, const UnitVec& query, Metric metric,
                                   int drop_axis) {
  const auto samples = boundary.samples();
  std::size_t best = 0;
  if (metric == Metric::Haversine) {
    // Great-circle distance is decreasing in the dot product.
    double best_dot = -2.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = samples[i].dot(query);
      if (d > best_dot) {
        best_dot = d;
        best = i;
      }
    }
  } else {
    check_axis(drop_axis);
    const Eigen::Vector2d q = drop(query.vec(), drop_axis);
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d2 = (drop(samples[i].vec(), drop_axis) - q).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
  }
  return best;
}

UnitVec nearest_boundary_point(const Boundary& boundary, const UnitVec& query, Metric metric, int drop_axis) {
  return boundary.samples()[nearest_boundary_index(boundary, query, metric, drop_axis)];
}

ScalingValue g_haversine(const Boundary& boundary, const UnitVec& x) {
  if (!boundary.contains(x)) return {0.0, Vector3d::Zero(), false};
  const Spherical z = to_spherical(x);
  UnitVec nearest;
  if (boundary.is_colatitude()) {
    // The meridian through x meets the circle orthogonally.
    nearest = to_euclidean(Spherical{boundary.a0(), z.b});
  } else {
    nearest = nearest_boundary_point(boundary, x, Metric::Haversine);
  }
  ScalingValue out;
  out.g = haversine_distance(z, to_spherical(nearest));
  out.grad = out.g > 0.0 ? haversine_ambient_gradient(x, nearest) : Vector3d::Zero();
  return out;
}

ScalingValue g_projected_euclidean(const Boundary& boundary, const UnitVec& x, int drop_axis) {
  check_axis(drop_axis);
  const double side = boundary.region_centroid()[drop_axis] >= 0.0 ? 1.0 : -1.0;
  if (boundary.projection_folds(drop_axis)) {
    throw std::domain_error("projected-Euclidean g: region is not contained in one hemisphere of axis " +
                            std::to_string(drop_axis));
  }
  if (!boundary.contains(x)) return {0.0, Vector3d::Zero(), false};
  if (!(side * x[drop_axis] > 0.0)) {
    throw std::domain_error("projected-Euclidean g: query point lies on the folded side of the projection");
  }

  const Eigen::Vector2d xe = drop(x.vec(), drop_axis);
  Eigen::Vector2d nearest;
  if (boundary.is_colatitude()) {
    const double rho = xe.norm();
    const double radius = std::sin(boundary.a0());
    nearest = rho > 0.0 ? Eigen::Vector2d(xe * (radius / rho)) : Eigen::Vector2d(radius, 0.0);
  } else {
    nearest = drop(nearest_boundary_point(boundary, x, Metric::Projected, drop_axis).vec(), drop_axis);
  }
  const Eigen::Vector2d diff = xe - nearest;
  ScalingValue out;
  out.g = diff.norm();
  out.grad = out.g > 0.0 ? lift(diff / out.g, drop_axis) : Vector3d::Zero();
  return out;
}

int default_drop_axis(const Boundary& boundary) {
  const UnitVec c = boundary.region_centroid();
  int axis = 0;
  c.vec().cwiseAbs().maxCoeff(&axis);
  return axis;
}

ScalingValue ScalingFunction::operator()(const Boundary& boundary, const UnitVec& x) const {
  switch (kind) {
    case GKind::Haversine: return g_haversine(boundary, x);
    case GKind::Projected: return g_projected_euclidean(boundary, x, drop_axis);
    case GKind::Unit: break;
  }
  return {1.0, Vector3d::Zero(), boundary.contains(x)};
}

}  // namespace tmsm
