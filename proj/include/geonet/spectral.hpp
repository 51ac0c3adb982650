#pragma once

#include <string>
#include <vector>

#include "geonet/network.hpp"

namespace geonet {

// Eigenvalue problem -L u = lambda u for L u = u'' + d u on the arcs, with
// value admissibility (vertex values in V1) and the derivative condition
// (outward derivatives in V2) at interior vertices, and u = 0 on the
// boundary. d is constant per arc, default 1 everywhere.
struct SpectralProblem {
  Network net;
  VertexSpaces spaces;
  Eigen::VectorXd d;

  static SpectralProblem make(Network net, double d_all = 1.0);
  static SpectralProblem make(Network net, Eigen::VectorXd d_per_arc);

  double max_d() const { return d.maxCoeff(); }
};

// The 2E x 2E vertex-condition matrix at spectral parameter lambda. Per arc
// the solution is A*C(mu, s) + B*S(mu, s) with mu = d + lambda; rows are the
// value conditions (B2^T values = 0), derivative conditions
// (B1^T outward derivatives = 0) and boundary Dirichlet rows. Entries are
// entire in lambda.
Eigen::MatrixXd secular_matrix(const SpectralProblem& prob, double lambda);

struct EigenvalueCluster {
  double lambda = 0.0;
  int multiplicity = 0;
  std::vector<NetworkFunction> eigenfunctions;  // L2-orthonormal
};

struct Spectrum {
  std::vector<EigenvalueCluster> clusters;  // sorted by lambda
  std::vector<std::string> warnings;

  int total_multiplicity() const;
  // Flat list with repetition by multiplicity.
  std::vector<double> flat() const;
};

struct ScanOptions {
  double coarse_step = 1e-2;
  double polish_tol = 1e-10;     // eigenvalue localization
  double zero_sv_rel = 1e-8;     // sigma_min below this * ||M|| declares a root
  double mult_sv_rel = 1e-7;     // multiplicity threshold
  double zero_band = 1e-6;       // |lambda| below this counts as nullity
  bool fem_check = true;         // reconcile counts against the FEM oracle
  int fem_segments = 96;
  int threads = 0;               // 0: GEONET_THREADS or a small default
};

// Scans sigma_min of the secular matrix over [lo, hi], isolates and polishes
// its zeros, extracts multiplicities and eigenfunctions, and cross-checks
// the count against an independent finite-element discretization. A count
// mismatch that survives a refined re-scan throws std::runtime_error.
Spectrum eigenvalues(const SpectralProblem& prob, double lo, double hi,
                     const ScanOptions& opts = {});

struct IndexNullity {
  int index = 0;
  int nullity = 0;
  std::vector<std::string> warnings;
};

// Index = total multiplicity below -zero_band, nullity = multiplicity within
// [-zero_band, zero_band], from a scan of [-max d - 1e-9, 0.5].
IndexNullity index_nullity(const SpectralProblem& prob,
                           const ScanOptions& opts = {});

// L2-orthonormal basis of the admissible locally constant functions (one
// constant per arc, vertex values in V1). These are eigenfunctions with
// lambda = -d when d is uniform.
std::vector<NetworkFunction> locally_constant_space(const Network& net);

// L2-orthonormal basis of the traces X . nu of the three coordinate-axis
// rotation fields; numerically null members are dropped. Each returned
// function is verified to satisfy the lambda = 0 vertex conditions. Requires
// a closed stationary network (and d = 1).
std::vector<NetworkFunction> rotation_nullspace(const Network& net);

// Solves (L - sigma) w = f with w = 0 on the boundary and the vertex
// conditions, for sigma large enough that the problem is coercive
// (sigma > max d). f is an analytic network function whose mode parameters
// must stay away from d - sigma. Throws std::runtime_error when the system
// is singular (sigma too small).
NetworkFunction shifted_solve(const SpectralProblem& prob, double sigma,
                              const NetworkFunction& f);

// L2-orthonormal basis of solutions of the lambda vertex-condition system
// (eigenfunctions when nonempty); empty when lambda is not an eigenvalue.
std::vector<NetworkFunction> secular_kernel(const SpectralProblem& prob,
                                            double lambda,
                                            double rel_tol = 1e-7);

// sigma_min(M(lambda)) samples at fixed step, for plotting.
std::vector<std::pair<double, double>> sigma_min_trace(
    const SpectralProblem& prob, double lo, double hi, double step);

}  // namespace geonet
