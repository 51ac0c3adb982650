#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "geonet/spectral.hpp"

namespace geonet {

// Independent discretization of the weak problem: P1 elements per arc,
// Dirichlet and V1 value constraints eliminated through the injection Z from
// reduced to full nodal coordinates; derivative conditions are natural. The
// reduced pencil (A, Mass) yields Rayleigh-Ritz eigenvalues, which are upper
// bounds with O(1/m^2) error.
struct FemSystem {
  Eigen::SparseMatrix<double> A;     // stiffness minus potential, reduced
  Eigen::SparseMatrix<double> Mass;  // reduced mass
  Eigen::SparseMatrix<double> Z;     // full nodal <- reduced
  std::vector<int> arc_node_offset;  // per arc, offset into the full vector
  int segments = 0;
  double spd_shift = 0.0;  // A + spd_shift * Mass is positive definite
};

FemSystem fem_assemble(const SpectralProblem& prob, int segments);

// Lowest `count` eigenvalues of the reduced pencil, ascending.
std::vector<double> fem_eigenvalues(const FemSystem& sys, int count);

// Convenience: assemble + solve. segments >= 4.
std::vector<double> fem_oracle(const SpectralProblem& prob, int segments,
                               int count = 20);

// Reduced load vector with entries int phi_k f over the arcs.
Eigen::VectorXd fem_load(const FemSystem& sys, const Network& net,
                         const NetworkFunction& f);

// min over the FEM space of 1/2 L_sigma(v, v) + int f v; the continuum
// minimizer can only do better.
double fem_shifted_energy_min(const FemSystem& sys, double sigma,
                              const Eigen::VectorXd& load);

}  // namespace geonet
