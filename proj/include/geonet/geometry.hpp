#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace geonet {

using Vec3 = Eigen::Vector3d;

// Validation tolerance for unit length and orthogonality of constructed data.
inline constexpr double kGeomTol = 1e-10;

// Normalizes v; throws std::invalid_argument on a near-zero vector.
Vec3 normalized(const Vec3& v);

// Deterministic orthonormal basis {e1, e2} of the plane orthogonal to unit p.
// Picks the coordinate axis most orthogonal to p, so the result is continuous
// away from axis switches and has no singular directions.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& p);

enum class Endpoint { Start, End };

// Oriented arc of a great circle on the unit sphere.
//
//   gamma(s) = start*cos(s) + (pole x start)*sin(s),  s in [0, length],
//
// with arc-length parameter s. The unit tangent is xi(s) = pole x gamma(s)
// and pole itself is the unit normal field along the arc (constant for great
// circles). length lies in (0, 2*pi); a full circle must be split into at
// least two arcs. end is derived from (start, pole, length) and cached.
struct GreatArc {
  Vec3 start;
  Vec3 pole;
  double length = 0.0;
  Vec3 end;

  // Builds and validates an arc. start and pole are normalized; pole must be
  // orthogonal to start within kGeomTol and length in (0, 2*pi).
  static GreatArc make(const Vec3& start, const Vec3& pole, double length);

  // Minor arc from a to b (angle < pi). If pole_hint is nonzero its sign
  // fixes the orientation of the pole.
  static GreatArc between(const Vec3& a, const Vec3& b,
                          const Vec3& pole_hint = Vec3::Zero());

  // gamma(s); throws std::domain_error for s outside [0, length].
  Vec3 point(double s) const;

  // xi(s) = pole x gamma(s); unit tangent in the direction of traversal.
  Vec3 unit_tangent(double s) const;

  // Exterior unit tangent at an endpoint: -xi(0) at Start, xi(length) at End.
  Vec3 outward_tangent(Endpoint e) const;
};

// Euclidean norm of the sum of the given tangents. Zero at a junction of a
// stationary network.
double balance_residual(const std::vector<Vec3>& tangents);

// Killing field X(x) = magnitude * (axis x x) of a rotation of the sphere.
struct RotationField {
  Vec3 axis;
  double magnitude = 1.0;

  Vec3 velocity(const Vec3& x) const { return magnitude * axis.cross(x); }
};

// Restriction of X . nu to an arc: u(s) = A*cos(s) + B*sin(s), returned as
// (A, B). Closed form, exact for any rotation field.
std::pair<double, double> rotation_normal_trace(const RotationField& field,
                                                const GreatArc& arc);

}  // namespace geonet
