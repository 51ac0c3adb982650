#include <doctest.h>

#include <cmath>
#include <random>

#include "geonet/fem.hpp"
#include "geonet/spectral.hpp"
#include "support.hpp"

using namespace geonet;
using namespace geonet::testsupport;

namespace {

ScanOptions fast_scan() {
  ScanOptions opts;
  opts.fem_check = false;  // the invariance loops re-run the scan many times
  return opts;
}

std::vector<double> spectrum_of(const Network& net, const ScanOptions& opts) {
  return eigenvalues(SpectralProblem::make(net), -1.0 - 1e-9, 0.5, opts).flat();
}

double max_list_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("refinement leaves the spectrum unchanged") {
  const Network base = catalog_build("tetrahedron");
  const auto opts = fast_scan();
  const auto reference = spectrum_of(base, opts);
  REQUIRE(reference.size() == 6);

  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    Network net = base;
    // One or two random refinements per trial.
    const int steps = 1 + (trial % 2);
    for (int s = 0; s < steps; ++s) {
      const auto& arcs = net.arcs();
      const int aid = arcs[rng() % arcs.size()].id;
      net = refine(net, aid, unif(rng));
    }
    CHECK(max_list_diff(reference, spectrum_of(net, opts)) < 1e-8);
    CHECK(net.total_length() ==
          doctest::Approx(base.total_length()).epsilon(1e-14));
    CHECK(net.max_balance_residual() < 1e-8);
  }

  SUBCASE("refining twice at the midpoint matches 0.25/0.75 splits") {
    Network a = refine(refine(base, 1, 0.5), 7, 0.5);
    Network b = refine(refine(base, 1, 0.25), 8, 2.0 / 3.0);
    CHECK(max_list_diff(spectrum_of(a, opts), spectrum_of(b, opts)) < 1e-8);
  }
}

TEST_CASE("orientation flips leave the spectrum unchanged") {
  const Network base = catalog_build("tetrahedron");
  const auto opts = fast_scan();
  const auto reference = spectrum_of(base, opts);

  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    Network net = base;
    const int flips = 1 + static_cast<int>(rng() % 3);
    for (int s = 0; s < flips; ++s) {
      net = flip_orientation(net, 1 + static_cast<int>(rng() % 6));
    }
    CHECK(max_list_diff(reference, spectrum_of(net, opts)) < 1e-8);
  }
}

TEST_CASE("eigenfunctions transported by a flip stay eigenfunctions") {
  const Network base = catalog_build("tetrahedron");
  const auto prob = SpectralProblem::make(base);
  const Spectrum spec = eigenvalues(prob, -1.5, 0.5, fast_scan());

  const int flipped_arc = 4;
  const Network flipped = flip_orientation(base, flipped_arc);
  const auto fprob = SpectralProblem::make(flipped);
  const int fidx = flipped.arc_index(flipped_arc);

  auto coeffs = [](const ArcFunction& af) {
    double A = 0.0, B = 0.0;
    for (const auto& m : af.modes) {
      A += m.A;
      B += m.B;
    }
    return std::pair{A, B};
  };

  for (const auto& c : spec.clusters) {
    const double mu = 1.0 + c.lambda;
    for (const auto& ef : c.eigenfunctions) {
      // Transport: negate on the flipped arc and reverse the parameter,
      // u~(s) = -u(len - s); in the entire basis this maps
      // (A, B) -> (-(A C + B S), A mu S - B C) evaluated at len.
      const double len = base.arc_by_id(flipped_arc).arc.length;
      const auto [A, B] = coeffs(ef.arcs[fidx]);
      const double C = basis_C(mu, len), S = basis_S(mu, len);
      Eigen::VectorXd x(2 * flipped.num_arcs());
      for (int i = 0; i < flipped.num_arcs(); ++i) {
        const auto [a, b] = coeffs(ef.arcs[i]);
        x(2 * i) = a;
        x(2 * i + 1) = b;
      }
      x(2 * fidx) = -(A * C + B * S);
      x(2 * fidx + 1) = -mu * A * S + B * C;
      // Residual of the transported function in the flipped problem.
      const Eigen::MatrixXd M = secular_matrix(fprob, c.lambda);
      CHECK((M * x).norm() / x.norm() < 1e-8);
    }
  }
}

TEST_CASE("weak-form identity for eigenpairs") {
  // |Q(phi, psi) - lambda <phi, psi>| stays below 1e-7 |phi| |psi| over many
  // random admissible test functions.
  for (const char* name : {"tetrahedron", "prism3"}) {
    CAPTURE(name);
    const Network net = catalog_build(name);
    const auto prob = SpectralProblem::make(net);
    const Spectrum spec = eigenvalues(prob, -1.5, 0.5, fast_scan());
    const Eigen::VectorXd d = Eigen::VectorXd::Ones(net.num_arcs());
    std::mt19937_64 rng(303);
    for (const auto& c : spec.clusters) {
      const NetworkFunction& phi = c.eigenfunctions.front();
      const double phin = l2_norm(net, phi);
      for (int trial = 0; trial < 200; ++trial) {
        const NetworkFunction psi = random_admissible(net, prob.spaces, rng);
        const double q = index_form(net, prob.spaces, phi, psi, d);
        const double ip = l2_inner_product(net, phi, psi);
        const double err = std::abs(q - c.lambda * ip);
        CHECK(err < 1e-7 * phin * (1.0 + l2_norm(net, psi)));
      }
    }
  }
}

TEST_CASE("index form is symmetric on random admissible pairs") {
  const Network net = catalog_build("prism3");
  const auto prob = SpectralProblem::make(net);
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(net.num_arcs());
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkFunction f = random_admissible(net, prob.spaces, rng);
    const NetworkFunction g = random_admissible(net, prob.spaces, rng);
    const double qfg = index_form(net, prob.spaces, f, g, d);
    const double qgf = index_form(net, prob.spaces, g, f, d);
    CHECK(std::abs(qfg - qgf) <
          1e-12 * (1.0 + std::abs(qfg) + std::abs(qgf)));
  }
}

TEST_CASE("vertex space bases are orthonormal complements") {
  for (const char* name : {"tetrahedron", "type44", "type82"}) {
    CAPTURE(name);
    const Network net = catalog_build(name);
    const VertexSpaces spaces = vertex_spaces(net);
    for (const auto& e : spaces.entries) {
      const int j = static_cast<int>(e.B1.rows());
      const int k = static_cast<int>(e.B1.cols());
      CHECK((e.B1.transpose() * e.B1 - Eigen::MatrixXd::Identity(k, k)).norm() <
            1e-12);
      CHECK((e.B2.transpose() * e.B2 -
             Eigen::MatrixXd::Identity(j - k, j - k))
                .norm() < 1e-12);
      if (k > 0 && j - k > 0) {
        CHECK((e.B1.transpose() * e.B2).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("end-count identity over all catalog nets") {
  for (const auto& e : catalog_entries()) {
    const Network net = catalog_build(e.name);
    int ends = 0;
    for (const auto& v : net.vertices()) ends += static_cast<int>(v.ends.size());
    CHECK(ends == 2 * net.num_arcs());
  }
}

TEST_CASE("min-max consistency against the FEM upper bounds") {
  for (const char* name : {"tetrahedron", "prism3", "three-half-circles"}) {
    CAPTURE(name);
    const auto prob = SpectralProblem::make(catalog_build(name));
    const auto flat = eigenvalues(prob, -1.5, 0.5, {}).flat();
    const auto fem = fem_oracle(prob, 96, static_cast<int>(flat.size()));
    for (size_t k = 0; k < flat.size() && k < fem.size(); ++k) {
      CHECK(flat[k] <= fem[k] + 1e-10);
    }
  }
}
