#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geonet/spectral.hpp"

namespace geonet {

// Violations of the solvability condition int f v + int_Q g dv/dtau = 0
// against an orthonormal basis of the lambda = 0 null space.
struct ObstructionReport {
  std::vector<double> violations;
  double tolerance = 0.0;
};

struct DirichletResult {
  std::optional<NetworkFunction> solution;  // minimum-L2-norm representative
  std::optional<ObstructionReport> obstruction;
  bool solvable() const { return solution.has_value(); }
};

// Solves L u = f on the network with u = g on the boundary and the vertex
// conditions. g lives on TraceSpace::over(net, all boundary vertex ids). When
// the system is singular the solvability condition is tested; failures come
// back as an obstruction report, never an exception.
DirichletResult dirichlet_solve(const SpectralProblem& prob,
                                const Eigen::VectorXd& g,
                                const NetworkFunction* f = nullptr);

// Null space of L on a network with boundary, together with its outward
// derivative traces on a boundary subset Qtilde.
struct NullTraceData {
  TraceSpace qt;                     // V(Qtilde) coordinates
  std::vector<NetworkFunction> j00;  // L2-orthonormal null space basis
  Eigen::MatrixXd dtrace_basis;      // dim x r orthonormal, D_tau J00(Qtilde)
  Eigen::MatrixXd dtrace_perp;       // dim x (dim - r), its complement
  std::vector<NetworkFunction> i0;   // null members with zero trace on Qtilde

  int dim_j00() const { return static_cast<int>(j00.size()); }
  int dim_dtrace() const { return static_cast<int>(dtrace_basis.cols()); }
  int dim_i0() const { return static_cast<int>(i0.size()); }
};

NullTraceData null_trace_data(const SpectralProblem& prob,
                              const std::vector<int>& qtilde_ids);

// L-extension of g in (D_tau J00(Qtilde))^perp: solves L u = 0 with u = g on
// Qtilde, u = 0 on the rest of the boundary, the vertex conditions, outward
// derivative trace orthogonal to D_tau J00(Qtilde), and u orthogonal to
// I0(Qtilde) in L2. Linear in g.
NetworkFunction l_extension(const SpectralProblem& prob,
                            const NullTraceData& data, const Eigen::VectorXd& g);

struct MatrixInertia {
  int negative = 0, zero = 0, positive = 0;
};

// Dirichlet-to-Neumann map on an orthonormal basis of its domain.
struct DtnMap {
  TraceSpace space;             // ambient per-(vertex, end) coordinates
  Eigen::MatrixXd basis;        // dim x r orthonormal domain basis
  Eigen::MatrixXd matrix;       // r x r symmetric
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;

  MatrixInertia inertia(double zero_tol_rel = 1e-8) const;
};

// D-N map of the network with respect to the boundary subset Qtilde, defined
// on (D_tau J00(Qtilde))^perp. The computed matrix must be symmetric within
// 1e-7 (relative); it is then symmetrized by averaging.
DtnMap dtn_map(const SpectralProblem& prob, const std::vector<int>& qtilde_ids);
DtnMap dtn_map(const SpectralProblem& prob, const NullTraceData& data);

// ---------------------------------------------------------------------------
// Partitions: cutting a network into pieces along interior vertices.

struct Partition {
  Network parent;
  std::vector<int> cut_ids;                     // Pbar, sorted
  std::vector<std::vector<int>> piece_arc_ids;  // arc ids per piece
  std::vector<Network> pieces;
  std::vector<std::vector<int>> piece_qtilde_ids;  // cut ids touched per piece
  // For each piece, parent cut-space slot of each piece Qtilde slot.
  std::vector<std::vector<int>> piece_slot_to_parent;
  TraceSpace cut_space;  // V(Pbar) on the parent

  int num_pieces() const { return static_cast<int>(pieces.size()); }

  static Partition make(const Network& parent,
                        std::vector<std::vector<int>> piece_arc_ids,
                        std::vector<int> cut_ids);
  static Partition trivial(const Network& parent);
  // Pieces = connected components of the arcs after removing cut vertices.
  static Partition by_cuts(const Network& parent, std::vector<int> cut_ids);
};

// Subspace bookkeeping of V(Pbar) = V1bar + V2bar + F1 + F2 (orthogonal).
struct SpaceLedger {
  Eigen::MatrixXd v1;     // V1(Pbar), block diagonal over cut vertices
  Eigen::MatrixXd v2;     // V2(Pbar)
  Eigen::MatrixXd v1bar;  // (+dtrace)^perp  intersect V1(Pbar)
  Eigen::MatrixXd v2bar;
  Eigen::MatrixXd f1;     // (+dtrace) intersect V1(Pbar)
  Eigen::MatrixXd f2;

  int dim_v1() const { return static_cast<int>(v1.cols()); }
  int dim_v2() const { return static_cast<int>(v2.cols()); }
  int dim_v1bar() const { return static_cast<int>(v1bar.cols()); }
  int dim_v2bar() const { return static_cast<int>(v2bar.cols()); }
  int dim_f1() const { return static_cast<int>(f1.cols()); }
  int dim_f2() const { return static_cast<int>(f2.cols()); }
};

struct GluedDtn {
  DtnMap tbar;  // on V1bar, basis in cut-space coordinates
  SpaceLedger ledger;
  std::vector<NullTraceData> piece_data;
  std::vector<DtnMap> piece_maps;
  double closure_residual = 0.0;  // distance of Proj1(That g) from V1bar
};

// Builds the per-piece D-N maps, the subspace ledger and the glued map
// Tbar = Proj1 . That restricted to V1bar. Throws std::runtime_error when the
// ledger dimension identities fail.
GluedDtn glued_dtn(const Partition& part, double d_all = 1.0);

// Piecewise L-extension of g (cut-space coordinates, g in V1bar) over the
// pieces; entry i lives on pieces[i].
std::vector<NetworkFunction> glued_extension(const Partition& part,
                                             const GluedDtn& glued,
                                             const Eigen::VectorXd& g);

struct TheoremReport {
  std::string name;
  long lhs = 0;
  long rhs = 0;
  bool pass = false;
  std::map<std::string, long> details;
};

struct VerificationReport {
  TheoremReport index_theorem;    // Ind(N) = sum Ind(N_i) + Ind(Tbar) + dim F1
  TheoremReport nullity_theorem;  // Nul(N) = Nul(Tbar) + dim F2 + sum dim I0
  TheoremReport sum_corollary;    // Ind+Nul(N) = sum (Ind+Nul)(N_i) + Ind+Nul(Tbar)
  std::map<std::string, long> dims;
  bool all_pass = false;
};

VerificationReport verify_partition(const Partition& part,
                                    const ScanOptions& opts = {},
                                    double d_all = 1.0);
TheoremReport verify_index_theorem(const Partition& part,
                                   const ScanOptions& opts = {});
TheoremReport verify_nullity_theorem(const Partition& part,
                                     const ScanOptions& opts = {});
TheoremReport verify_sum_corollary(const Partition& part,
                                   const ScanOptions& opts = {});

}  // namespace geonet
