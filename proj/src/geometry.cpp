#include "geonet/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geonet {

Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  if (n < 1e-14) throw std::invalid_argument("normalized(): zero-length vector");
  if (std::abs(n - 1.0) < 1e-14) return v;  // idempotent on unit input
  return v / n;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& p) {
  const double ax = std::abs(p.x()), ay = std::abs(p.y()), az = std::abs(p.z());
  Vec3 helper;
  if (ax <= ay && ax <= az) {
    helper = Vec3::UnitX();
  } else if (ay <= az) {
    helper = Vec3::UnitY();
  } else {
    helper = Vec3::UnitZ();
  }
  const Vec3 e1 = normalized(helper.cross(p));
  const Vec3 e2 = p.cross(e1);
  return {e1, e2};
}

GreatArc GreatArc::make(const Vec3& start, const Vec3& pole, double length) {
  GreatArc a;
  a.start = normalized(start);
  a.pole = normalized(pole);
  const double drift = a.pole.dot(a.start);
  if (std::abs(drift) > kGeomTol) {
    throw std::invalid_argument("GreatArc: pole not orthogonal to start");
  }
  // Re-project unless the orthogonality already holds at machine precision.
  if (std::abs(drift) > 1e-15) {
    a.pole = normalized(a.pole - drift * a.start);
  }
  if (!(length > 0.0) || !(length < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("GreatArc: length must lie in (0, 2*pi)");
  }
  a.length = length;
  a.end = a.start * std::cos(length) + a.pole.cross(a.start) * std::sin(length);
  return a;
}

GreatArc GreatArc::between(const Vec3& a, const Vec3& b, const Vec3& pole_hint) {
  const Vec3 u = normalized(a);
  const Vec3 v = normalized(b);
  const Vec3 c = u.cross(v);
  const double s = c.norm();
  if (s < 1e-12) {
    throw std::invalid_argument(
        "GreatArc::between: endpoints coincident or antipodal");
  }
  Vec3 pole = c / s;
  if (pole_hint.squaredNorm() > 0.0 && pole.dot(pole_hint) < 0.0) pole = -pole;
  double ang = std::atan2(s, u.dot(v));
  if (pole.dot(c) < 0.0) ang = 2.0 * std::numbers::pi - ang;
  return make(u, pole, ang);
}

Vec3 GreatArc::point(double s) const {
  if (s < -1e-12 || s > length + 1e-12) {
    throw std::domain_error("GreatArc::point: parameter outside [0, length]");
  }
  return start * std::cos(s) + pole.cross(start) * std::sin(s);
}

Vec3 GreatArc::unit_tangent(double s) const { return pole.cross(point(s)); }

Vec3 GreatArc::outward_tangent(Endpoint e) const {
  if (e == Endpoint::Start) return -unit_tangent(0.0);
  return unit_tangent(length);
}

double balance_residual(const std::vector<Vec3>& tangents) {
  if (tangents.empty()) {
    throw std::invalid_argument("balance_residual: empty tangent list");
  }
  Vec3 sum = Vec3::Zero();
  for (const Vec3& t : tangents) sum += t;
  return sum.norm();
}

std::pair<double, double> rotation_normal_trace(const RotationField& field,
                                                const GreatArc& arc) {
  const Vec3 q = arc.pole.cross(arc.start);
  const double A = field.magnitude * field.axis.cross(arc.start).dot(arc.pole);
  const double B = field.magnitude * field.axis.cross(q).dot(arc.pole);
  return {A, B};
}

}  // namespace geonet
