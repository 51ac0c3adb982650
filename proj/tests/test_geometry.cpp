#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geonet/basis.hpp"
#include "geonet/catalog.hpp"
#include "geonet/geometry.hpp"

using namespace geonet;

namespace {
constexpr double kPi = std::numbers::pi;

GreatArc quarter_arc() {
  return GreatArc::make({1, 0, 0}, {0, 0, 1}, kPi / 2);
}
}  // namespace

TEST_CASE("arc endpoints and quarter turn") {
  const GreatArc a = quarter_arc();
  CHECK((a.point(0.0) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((a.point(kPi / 2) - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK((a.end - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(a.point(2.0), std::domain_error);
  CHECK_THROWS_AS(a.point(-0.5), std::domain_error);
}

TEST_CASE("tetrahedron edge length closes to inner product -1/3") {
  const double l = std::acos(-1.0 / 3.0);
  const double r = 1.0 / std::sqrt(3.0);
  const Vec3 p(r, r, r), q(r, -r, -r);
  const GreatArc a = GreatArc::between(p, q);
  CHECK(a.length == doctest::Approx(l).epsilon(1e-12));
  CHECK(a.point(a.length).dot(p) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("outward tangents") {
  const GreatArc a = quarter_arc();
  CHECK((a.outward_tangent(Endpoint::Start) - Vec3(0, -1, 0)).norm() < 1e-12);
  CHECK((a.outward_tangent(Endpoint::End) - Vec3(-1, 0, 0)).norm() < 1e-12);
  // Tangency at the endpoints.
  CHECK(std::abs(a.outward_tangent(Endpoint::Start).dot(a.start)) < 1e-12);
  CHECK(std::abs(a.outward_tangent(Endpoint::End).dot(a.end)) < 1e-12);
}

TEST_CASE("arc invariants: unit speed, tangent and normal frames") {
  const GreatArc a = GreatArc::between(normalized(Vec3(0.3, -0.5, 0.8)),
                                       normalized(Vec3(-0.6, 0.2, 0.7)));
  for (double s : {0.0, 0.3 * a.length, 0.7 * a.length, a.length}) {
    const Vec3 g = a.point(s);
    CHECK(std::abs(g.norm() - 1.0) < 1e-14);
    const Vec3 xi = a.unit_tangent(s);
    CHECK(std::abs(xi.norm() - 1.0) < 1e-13);
    CHECK(std::abs(xi.dot(g)) < 1e-13);
    CHECK(std::abs(a.pole.dot(g)) < 1e-12);
    CHECK(std::abs(a.pole.dot(xi)) < 1e-12);
    // d/ds gamma = pole x gamma by finite differences.
    if (s > 1e-6 && s < a.length - 1e-6) {
      const double h = 1e-6;
      const Vec3 fd = (a.point(s + h) - a.point(s - h)) / (2 * h);
      CHECK((fd - xi).norm() < 1e-8);
    }
  }
}

TEST_CASE("balance residual") {
  const Vec3 t = normalized(Vec3(0.2, 0.9, -0.1));
  CHECK(balance_residual({t, -t}) < 1e-15);

  // Three coplanar unit vectors at mutual angle 2*pi/3.
  std::vector<Vec3> taus;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * kPi * k / 3.0;
    taus.push_back({std::cos(a), std::sin(a), 0.0});
  }
  CHECK(balance_residual(taus) < 1e-14);

  // Junction of the explicit tetrahedron construction.
  const Network net = catalog_build("tetrahedron");
  CHECK(net.max_balance_residual() < 1e-10);
}

TEST_CASE("rotation trace closed form") {
  const GreatArc a = quarter_arc();

  SUBCASE("axis equal to the pole gives the zero trace") {
    const auto [A, B] = rotation_normal_trace({a.pole, 2.0}, a);
    CHECK(std::abs(A) < 1e-15);
    CHECK(std::abs(B) < 1e-15);
  }

  SUBCASE("axis orthogonal to the pole moves the arc") {
    const auto [A, B] = rotation_normal_trace({{1, 0, 0}, 1.0}, a);
    CHECK(std::hypot(A, B) > 0.1);
  }

  SUBCASE("trace matches sampled X . nu and solves u'' + u = 0") {
    const RotationField f{normalized(Vec3(0.5, -0.2, 0.8)), 1.3};
    const auto [A, B] = rotation_normal_trace(f, a);
    for (double s : {0.1, 0.7, 1.4}) {
      const double direct = f.velocity(a.point(s)).dot(a.pole);
      CHECK(direct ==
            doctest::Approx(A * std::cos(s) + B * std::sin(s)).epsilon(1e-12));
    }
    // Sampled second differences of u agree with -u.
    const double h = 1e-3;
    auto u = [&](double s) { return A * std::cos(s) + B * std::sin(s); };
    const double s0 = 0.6;
    const double second = (u(s0 + h) - 2 * u(s0) + u(s0 - h)) / (h * h);
    CHECK(std::abs(second + u(s0)) < 1e-6);
  }
}

TEST_CASE("rotation fixing a junction vanishes there") {
  const Network net = catalog_build("tetrahedron");
  const Vec3 p = net.vertices().front().pos;
  const RotationField f{p, 1.0};
  for (const auto& e : net.vertices().front().ends) {
    const auto& na = net.arc_by_id(e.arc_id);
    const auto [A, B] = rotation_normal_trace(f, na.arc);
    const double s = e.end == Endpoint::Start ? 0.0 : na.arc.length;
    CHECK(std::abs(A * std::cos(s) + B * std::sin(s)) < 1e-12);
  }
}

TEST_CASE("oscillator basis and integrals") {
  for (double mu : {-2.0, -1e-9, 0.0, 1e-9, 0.5, 4.0}) {
    const double l = 1.7;
    // C' = -mu S and S' = C by finite differences.
    const double h = 1e-6;
    const double dc = (basis_C(mu, l + h) - basis_C(mu, l - h)) / (2 * h);
    const double ds = (basis_S(mu, l + h) - basis_S(mu, l - h)) / (2 * h);
    CHECK(dc == doctest::Approx(-mu * basis_S(mu, l)).epsilon(1e-8));
    CHECK(ds == doctest::Approx(basis_C(mu, l)).epsilon(1e-8));
    // Closed-form integrals against Simpson quadrature.
    const auto cc = simpson([&](double s) { return basis_C(mu, s) * basis_C(mu, s); },
                            0, l, 512);
    const auto cs = simpson([&](double s) { return basis_C(mu, s) * basis_S(mu, s); },
                            0, l, 512);
    const auto ss = simpson([&](double s) { return basis_S(mu, s) * basis_S(mu, s); },
                            0, l, 512);
    CHECK(int_CC(mu, l) == doctest::Approx(cc).epsilon(1e-10));
    CHECK(int_CS(mu, l) == doctest::Approx(cs).epsilon(1e-10));
    CHECK(int_SS(mu, l) == doctest::Approx(ss).epsilon(1e-10));
  }
}

TEST_CASE("arc construction validation") {
  CHECK_THROWS_AS(GreatArc::make({1, 0, 0}, {1, 0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GreatArc::make({1, 0, 0}, {0, 0, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GreatArc::make({1, 0, 0}, {0, 0, 1}, 7.0), std::invalid_argument);
  CHECK_THROWS_AS(GreatArc::between({1, 0, 0}, {-1, 0, 0}), std::invalid_argument);
}
