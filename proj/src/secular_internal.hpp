#pragma once

// Shared assembly of the vertex-condition linear systems: used by the
// eigenvalue scan, the shifted solver and the Dirichlet / extension problems.

#include <Eigen/Dense>
#include <vector>

#include "geonet/basis.hpp"
#include "geonet/network.hpp"
#include "geonet/spectral.hpp"

namespace geonet::detail {

// Value and outward derivative of u = A C(mu,.) + B S(mu,.) + up at one arc
// end, as affine forms in (A, B).
struct EndForm {
  double va = 0.0, vb = 0.0, vp = 0.0;  // value
  double da = 0.0, db = 0.0, dp = 0.0;  // outward derivative
};

inline EndForm end_form(const GreatArc& arc, Endpoint e, double mu,
                        const ArcFunction* up) {
  EndForm f;
  if (e == Endpoint::Start) {
    f.va = 1.0;
    f.vb = 0.0;
    f.da = 0.0;
    f.db = -1.0;
    if (up != nullptr) {
      f.vp = up->value(0.0);
      f.dp = -up->deriv(0.0);
    }
  } else {
    const double l = arc.length;
    f.va = basis_C(mu, l);
    f.vb = basis_S(mu, l);
    f.da = -mu * f.vb;
    f.db = f.va;
    if (up != nullptr) {
      f.vp = up->value(l);
      f.dp = up->deriv(l);
    }
  }
  return f;
}

struct SecularSystem {
  Eigen::MatrixXd M;    // rows x 2E; columns (A_0, B_0, A_1, B_1, ...)
  Eigen::VectorXd rhs;  // rows
  TraceSpace boundary;  // all boundary vertices
  std::vector<int> dirichlet_row;  // row of each boundary slot
};

// Assembles the vertex-condition system at per-arc parameters mu. particular
// (optional) supplies a per-arc particular solution moved to the right-hand
// side; boundary_g (optional, over `boundary`) supplies Dirichlet data.
SecularSystem assemble_system(const SpectralProblem& prob,
                              const Eigen::VectorXd& mu,
                              const std::vector<ArcFunction>* particular,
                              const Eigen::VectorXd* boundary_g);

// Coefficient vector -> network function (appends particular modes when given).
NetworkFunction coeffs_to_function(const SpectralProblem& prob,
                                   const Eigen::VectorXd& mu,
                                   const Eigen::VectorXd& x,
                                   const std::vector<ArcFunction>* particular);

// Particular solution of u'' + mu u = source with u(0) = u'(0) = 0, for an
// analytic source. Throws when a source mode parameter is within 1e-6 of mu.
ArcFunction particular_solution(double mu, const ArcFunction& source);

// L2-orthonormalizes a set of network functions in place (symmetric
// orthonormalization); drops members below drop_tol in norm.
std::vector<NetworkFunction> l2_orthonormalize(const Network& net,
                                               std::vector<NetworkFunction> fns,
                                               double drop_tol = 1e-12);

}  // namespace geonet::detail
