#pragma once

// Truncation boundaries on S^2 and the boundary-vanishing scaling functions g
// used by truncated score matching: the great-circle (Haversine) distance and
// the Euclidean distance after projecting onto a coordinate plane.

#include "tmsm/sphere_geometry.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tmsm {

using UnitVec = UnitVector<double>;
using Spherical = SphericalCoord<double>;

/// Which side of a constant-colatitude circle is observed.
enum class Side { Greater, Less };

enum class GKind { Haversine, Projected, Unit };
enum class Metric { Haversine, Projected };

/// A closed curve bounding the observed region. Either the circle a = a0 with
/// the region on one side of it, or a closed geodesic polygon whose interior
/// is the side the polygon winds around.
class Boundary {
 public:
  static constexpr std::size_t kDefaultResolution = 4096;

  static Boundary colatitude(double a0, Side side = Side::Greater,
                             std::size_t resolution = kDefaultResolution);
  static Boundary polyline(std::vector<UnitVec> vertices,
                           std::size_t resolution = kDefaultResolution);

  bool is_colatitude() const { return !vertices_.has_value(); }
  double a0() const { return a0_; }
  Side side() const { return side_; }
  std::span<const UnitVec> vertices() const;

  /// Dense sample of boundary points used by the nearest-point queries.
  std::span<const UnitVec> samples() const { return samples_; }
  /// Largest great-circle gap between consecutive samples.
  double sample_spacing() const { return spacing_; }

  /// Region membership (strict interior).
  bool contains(const UnitVec& x) const;

  /// Unit vector pointing at the centre of the observed region.
  const UnitVec& region_centroid() const { return centroid_; }

  /// True when projecting along `axis` would fold the region onto itself.
  bool projection_folds(int axis) const { return folds_[static_cast<std::size_t>(axis)]; }

 private:
  Boundary() = default;
  void finalize();

  double a0_{0.0};
  Side side_{Side::Greater};
  std::optional<std::vector<UnitVec>> vertices_;
  std::vector<UnitVec> samples_;
  double spacing_{0.0};
  UnitVec centroid_;
  // Gnomonic chart centred on the centroid, for polygon membership.
  Vector3d gnomonic_e_{Vector3d::Zero()};
  Vector3d gnomonic_f_{Vector3d::Zero()};
  std::vector<Eigen::Vector2d> gnomonic_vertices_;
  std::array<bool, 3> folds_{true, true, true};
};

/// g and its ambient gradient. `inside` is false when the query was not in
/// the open region, in which case g and grad are zero.
struct ScalingValue {
  double g{0.0};
  Vector3d grad{Vector3d::Zero()};
  bool inside{true};
};

/// Great-circle distance between two chart points on the unit sphere.
double haversine_distance(const Spherical& z, const Spherical& zp);

/// Gradient of haversine_distance(., zp) with respect to (a, b) at z.
Eigen::Vector2d haversine_gradient(const Spherical& z, const Spherical& zp);

ScalingValue g_haversine(const Boundary& boundary, const UnitVec& x);

/// drop_axis is the zero-based embedding coordinate that is discarded.
ScalingValue g_projected_euclidean(const Boundary& boundary, const UnitVec& x, int drop_axis);

/// Index of the minimizing boundary sample; ties go to the lowest index.
std::size_t nearest_boundary_index(const Boundary& boundary, const UnitVec& query, Metric metric,
                                   int drop_axis = 0);
UnitVec nearest_boundary_point(const Boundary& boundary, const UnitVec& query, Metric metric,
                               int drop_axis = 0);

/// Coordinate axis most aligned with the region centroid.
int default_drop_axis(const Boundary& boundary);

/// A configured choice of g.
struct ScalingFunction {
  GKind kind{GKind::Haversine};
  int drop_axis{0};

  static ScalingFunction haversine() { return {GKind::Haversine, 0}; }
  static ScalingFunction projected(int axis) { return {GKind::Projected, axis}; }
  static ScalingFunction projected(const Boundary& b) { return {GKind::Projected, default_drop_axis(b)}; }
  static ScalingFunction unit() { return {GKind::Unit, 0}; }

  /// Unit g ignores the boundary entirely (g = 1, grad = 0), but still
  /// reports membership.
  ScalingValue operator()(const Boundary& boundary, const UnitVec& x) const;
};

}  // namespace tmsm
