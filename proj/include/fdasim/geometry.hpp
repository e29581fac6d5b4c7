// Scene geometry: radar/jammer angles, the clutter iso-range circle and the
// elliptical ground trajectory of scattered-wave jamming.
//
// Global frame: radar at (0, 0, H), ground plane z = 0, platform moving along +X.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdasim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Position3D&) const = default;
};

inline double distance(const Position3D& a, const Position3D& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

/// Azimuth measured from +X in the ground plane, elevation measured down from
/// the horizontal (both radians).
struct Angles {
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// cos(azimuth) * cos(elevation), the cone-angle cosine seen by a linear array
/// along X.
inline double direction_cosine(const Angles& a) {
  return std::cos(a.azimuth) * std::cos(a.elevation);
}

class GeometryError : public std::runtime_error {
 public:
  enum class Kind {
    kDegeneratePosition,
    kInvalidScene,
    kNoIntersection,
    kDegenerateConic,
    kEmptyRing,
  };

  GeometryError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline Angles jammer_angles(double radar_height, const Position3D& jammer) {
  const double ground = std::hypot(jammer.x, jammer.y);
  if (ground == 0.0) {
    throw GeometryError(GeometryError::Kind::kDegeneratePosition,
                        "jammer azimuth undefined: jammer is on the radar's vertical axis");
  }
  return {std::atan2(jammer.y, jammer.x), std::atan(radar_height / ground)};
}

inline double focal_distance(const Position3D& radar, const Position3D& jammer) {
  return distance(radar, jammer);
}

struct SceneGeometry {
  double radar_height = 0.0;
  Position3D jammer_position;
  double target_range = 0.0;
  double platform_velocity = 0.0;
  // Empty when the jammer sits on the radar's vertical axis.
  std::optional<Angles> jammer_direction;
  double focal_distance = 0.0;

  Position3D radar_position() const { return {0.0, 0.0, radar_height}; }
  double clutter_ground_radius() const {
    return std::sqrt(target_range * target_range - radar_height * radar_height);
  }
};

inline SceneGeometry make_scene(double radar_height, const Position3D& jammer,
                                double target_range, double platform_velocity) {
  using K = GeometryError::Kind;
  if (!(radar_height > 0.0) || !std::isfinite(radar_height)) {
    throw GeometryError(K::kInvalidScene, "radar height must be positive");
  }
  if (!(target_range > radar_height) || !std::isfinite(target_range)) {
    throw GeometryError(K::kInvalidScene,
                        "target range must exceed the radar height (no iso-range ring)");
  }
  if (!std::isfinite(jammer.x) || !std::isfinite(jammer.y) || !std::isfinite(jammer.z)) {
    throw GeometryError(K::kInvalidScene, "jammer position must be finite");
  }
  SceneGeometry g;
  g.radar_height = radar_height;
  g.jammer_position = jammer;
  g.target_range = target_range;
  g.platform_velocity = platform_velocity;
  g.focal_distance = focal_distance(g.radar_position(), jammer);
  if (!(g.focal_distance < 2.0 * target_range)) {
    throw GeometryError(K::kInvalidScene,
                        "focal distance " + std::to_string(g.focal_distance) +
                            " m must be below twice the target range");
  }
  if (std::hypot(jammer.x, jammer.y) > 0.0) {
    g.jammer_direction = jammer_angles(radar_height, jammer);
  }
  return g;
}

// -----------------------------------------------------------------------------
// Elliptical trajectory
// -----------------------------------------------------------------------------

/// Ground-plane conic  Q1 x^2 + Q2 xy + Q3 y^2 + Q4 x + Q5 y + Q6 = 0 together
/// with its canonical form. The conic is ground truth; the canonical
/// parameters are derived from it.
struct EllipseTrajectory {
  std::array<double, 6> q{};
  double center_x = 0.0;
  double center_y = 0.0;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  /// Angle of the major axis from +X, in (-pi/2, pi/2].
  double orientation = 0.0;

  double evaluate(double x, double y) const {
    return q[0] * x * x + q[1] * x * y + q[2] * y * y + q[3] * x + q[4] * y + q[5];
  }

  /// Point on the ellipse at parametric angle t.
  Position3D point_at(double t) const {
    const double c = std::cos(orientation);
    const double s = std::sin(orientation);
    const double u = semi_major * std::cos(t);
    const double v = semi_minor * std::sin(t);
    return {center_x + c * u - s * v, center_y + s * u + c * v, 0.0};
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (double v : q) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Centre and axis-aligned semi-axes from the closed-form centre expressions.
/// Only meaningful when Q2 == 0; used to cross-check the eigen-rotation.
struct AxisAlignedEllipse {
  double center_x;
  double center_y;
  double semi_axis_x;
  double semi_axis_y;
};

inline AxisAlignedEllipse axis_aligned_form(const std::array<double, 6>& q) {
  const double det = 4.0 * q[0] * q[2] - q[1] * q[1];
  const double fx = (q[1] * q[4] - 2.0 * q[2] * q[3]) / det;
  const double fy = (q[1] * q[3] - 2.0 * q[0] * q[4]) / det;
  const double value_at_center = q[5] + 0.5 * (q[3] * fx + q[4] * fy);
  return {fx, fy, std::sqrt(-value_at_center / q[0]), std::sqrt(-value_at_center / q[2])};
}

namespace detail {

inline EllipseTrajectory canonicalize(const std::array<double, 6>& q) {
  using K = GeometryError::Kind;
  const double det = 4.0 * q[0] * q[2] - q[1] * q[1];
  const double scale = std::max({std::abs(q[0]), std::abs(q[1]), std::abs(q[2])});
  if (!(q[0] > 0.0) || !(q[2] > 0.0) || !(det > 1e-14 * scale * scale)) {
    throw GeometryError(K::kDegenerateConic, "trajectory conic is not an ellipse");
  }
  EllipseTrajectory e;
  e.q = q;
  e.center_x = (q[1] * q[4] - 2.0 * q[2] * q[3]) / det;
  e.center_y = (q[1] * q[3] - 2.0 * q[0] * q[4]) / det;
  const double value_at_center = q[5] + 0.5 * (q[3] * e.center_x + q[4] * e.center_y);
  if (!(value_at_center < 0.0)) {
    throw GeometryError(K::kNoIntersection,
                        "jamming ellipsoid does not reach the ground plane");
  }
  const double mean = 0.5 * (q[0] + q[2]);
  const double radius = std::hypot(0.5 * (q[0] - q[2]), 0.5 * q[1]);
  const double lambda_min = mean - radius;
  const double lambda_max = mean + radius;
  e.semi_major = std::sqrt(-value_at_center / lambda_min);
  e.semi_minor = std::sqrt(-value_at_center / lambda_max);
  double orientation = 0.5 * std::atan2(-q[1], q[2] - q[0]);
  if (orientation <= -0.5 * kPi) orientation += kPi;
  e.orientation = orientation;
  return e;
}

}  // namespace detail

/// Intersection of the ground plane with the ellipsoid whose foci are the
/// radar and the jammer and whose major axis is 2 * target_range.
///
/// With a = R_t, b^2 = R_t^2 - (R_f/2)^2, centre c between the foci and unit
/// focal axis u, the ellipsoid is (u.(p-c))^2 / a^2 + (|p-c|^2 - (u.(p-c))^2) / b^2 = 1.
/// Substituting p = (x, y, 0) gives the conic coefficients.
inline EllipseTrajectory jamming_trajectory(const SceneGeometry& geom) {
  const Position3D radar = geom.radar_position();
  const Position3D& jammer = geom.jammer_position;
  const double rf = geom.focal_distance;
  const double a2 = geom.target_range * geom.target_range;
  const double b2 = a2 - 0.25 * rf * rf;
  if (!(b2 > 0.0)) {
    throw GeometryError(GeometryError::Kind::kInvalidScene,
                        "focal distance must be below twice the target range");
  }
  const double cx = 0.5 * (radar.x + jammer.x);
  const double cy = 0.5 * (radar.y + jammer.y);
  const double cz = 0.5 * (radar.z + jammer.z);
  double ux = 0.0, uy = 0.0, uz = 1.0;
  if (rf > 0.0) {
    ux = (jammer.x - radar.x) / rf;
    uy = (jammer.y - radar.y) / rf;
    uz = (jammer.z - radar.z) / rf;
  }
  // x' = ux x + uy y + k on the ground plane.
  const double k = -(ux * cx + uy * cy + uz * cz);
  // 1/a^2 - 1/b^2 written to stay exact at rf = 0.
  const double axial = -(0.25 * rf * rf) / (a2 * b2);
  std::array<double, 6> q{};
  q[0] = axial * ux * ux + 1.0 / b2;
  q[1] = 2.0 * axial * ux * uy;
  q[2] = axial * uy * uy + 1.0 / b2;
  q[3] = 2.0 * axial * ux * k - 2.0 * cx / b2;
  q[4] = 2.0 * axial * uy * k - 2.0 * cy / b2;
  q[5] = axial * k * k + (cx * cx + cy * cy + cz * cz) / b2 - 1.0;
  return detail::canonicalize(q);
}

// -----------------------------------------------------------------------------
// Scatterer rings
// -----------------------------------------------------------------------------

enum class RingKind { kClutter, kJamming };

struct Scatterer {
  Position3D position;
  /// Direction seen from the radar; cos(elevation) = ground range / slant range.
  Angles direction;
};

struct ScattererRing {
  RingKind kind = RingKind::kClutter;
  std::vector<Scatterer> points;

  std::size_t size() const { return points.size(); }
};

inline Scatterer scatterer_at(const SceneGeometry& geom, double x, double y,
                              double azimuth) {
  const double ground = std::hypot(x, y);
  return {{x, y, 0.0}, {azimuth, std::atan2(geom.radar_height, ground)}};
}

inline ScattererRing sample_clutter_ring(const SceneGeometry& geom, int n) {
  if (n < 1) {
    throw GeometryError(GeometryError::Kind::kEmptyRing, "clutter ring needs at least one patch");
  }
  ScattererRing ring;
  ring.kind = RingKind::kClutter;
  ring.points.reserve(static_cast<std::size_t>(n));
  const double radius = geom.clutter_ground_radius();
  for (int i = 0; i < n; ++i) {
    const double az = kTwoPi * i / n;
    ring.points.push_back(scatterer_at(geom, radius * std::cos(az), radius * std::sin(az), az));
  }
  return ring;
}

/// Azimuth sector [min, max] covered by the trajectory as seen from the
/// origin. When the ellipse encloses the origin the sector is [0, 2pi).
struct AzimuthSector {
  double min = 0.0;
  double max = kTwoPi;
  bool full = true;
};

inline AzimuthSector trajectory_sector(const EllipseTrajectory& traj) {
  const auto& q = traj.q;
  if (q[5] < 0.0) return {};
  // The discriminant of the ray quadratic, as a quadratic form in
  // (cos phi, sin phi); its zero set bounds the sector.
  const double m11 = q[3] * q[3] - 4.0 * q[0] * q[5];
  const double m12 = q[3] * q[4] - 2.0 * q[1] * q[5];
  const double m22 = q[4] * q[4] - 4.0 * q[2] * q[5];
  const double mean = 0.5 * (m11 + m22);
  const double radius = std::hypot(0.5 * (m11 - m22), m12);
  const double mu_neg = mean - radius;
  const double mu_pos = mean + radius;
  if (!(mu_pos > 0.0)) {
    throw GeometryError(GeometryError::Kind::kEmptyRing,
                        "no azimuth admits a trajectory point");
  }
  // Eigenvector of the positive eigenvalue, pointed at the ellipse centre.
  // Of the two equivalent forms, the longer one is the well-conditioned one.
  double ex = m12, ey = mu_pos - m11;
  if (std::hypot(mu_pos - m22, m12) > std::hypot(ex, ey)) {
    ex = mu_pos - m22;
    ey = m12;
  }
  if (ex * traj.center_x + ey * traj.center_y < 0.0) {
    ex = -ex;
    ey = -ey;
  }
  const double axis = std::atan2(ey, ex);
  const double psi0 = std::atan(std::sqrt(std::max(0.0, -mu_neg) / mu_pos));
  const double half_width = 0.5 * kPi - psi0;
  return {axis - half_width, axis + half_width, false};
}

/// Samples the jamming trajectory on equally spaced azimuth rays from the
/// origin. A ray that crosses the ellipse twice contributes both points,
/// nearest first.
inline ScattererRing sample_jamming_ring(const SceneGeometry& geom,
                                         const EllipseTrajectory& traj, int n) {
  using K = GeometryError::Kind;
  if (n < 2) throw GeometryError(K::kEmptyRing, "jamming ring needs at least two patches");
  const auto& q = traj.q;
  const AzimuthSector sector = trajectory_sector(traj);
  ScattererRing ring;
  ring.kind = RingKind::kJamming;
  const double scale = std::max(traj.semi_major, std::hypot(traj.center_x, traj.center_y));
  for (int i = 0; i < n; ++i) {
    const double az = sector.full ? kTwoPi * i / n
                                  : sector.min + (sector.max - sector.min) * i / (n - 1);
    const double c = std::cos(az);
    const double s = std::sin(az);
    const double qa = q[0] * c * c + q[1] * c * s + q[2] * s * s;
    const double qb = q[3] * c + q[4] * s;
    const double qc = q[5];
    double disc = qb * qb - 4.0 * qa * qc;
    const double disc_scale = qb * qb + std::abs(4.0 * qa * qc);
    if (disc < 0.0) {
      if (disc > -1e-9 * disc_scale) {
        disc = 0.0;
      } else {
        continue;
      }
    }
    const double root = std::sqrt(disc);
    const double qq = -0.5 * (qb + std::copysign(root, qb));
    double r1 = qq / qa;
    double r2 = qq != 0.0 ? qc / qq : r1;
    if (r1 > r2) std::swap(r1, r2);
    const double min_radius = 1e-12 * scale;
    const bool tangent = root <= 1e-9 * std::sqrt(disc_scale);
    if (r1 > min_radius) ring.points.push_back(scatterer_at(geom, r1 * c, r1 * s, az));
    if (r2 > min_radius && !(tangent && r1 > min_radius)) {
      ring.points.push_back(scatterer_at(geom, r2 * c, r2 * s, az));
    }
  }
  if (ring.points.empty()) throw GeometryError(K::kEmptyRing, "jamming ring is empty");
  return ring;
}

}  // namespace fdasim
