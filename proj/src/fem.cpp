#include "geonet/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace geonet {

namespace {

using Trip = Eigen::Triplet<double>;

// Reduced coordinates: every arc-interior node is free; the endpoint values
// at an interior vertex are B1 * y with y free; boundary endpoints are zero.
struct Reduction {
  std::vector<Trip> z;  // full <- reduced
  int reduced = 0;
};

}  // namespace

FemSystem fem_assemble(const SpectralProblem& prob, int segments) {
  if (segments < 4) {
    throw std::invalid_argument("fem_assemble: need at least 4 segments per arc");
  }
  const Network& net = prob.net;
  const int E = net.num_arcs();
  const int m = segments;

  FemSystem sys;
  sys.segments = m;
  sys.arc_node_offset.resize(E);
  int full = 0;
  for (int i = 0; i < E; ++i) {
    sys.arc_node_offset[i] = full;
    full += m + 1;
  }

  std::vector<Trip> ka, ma;
  for (int i = 0; i < E; ++i) {
    const double h = net.arcs()[i].arc.length / m;
    const double di = prob.d(i);
    const int off = sys.arc_node_offset[i];
    for (int k = 0; k < m; ++k) {
      const int a = off + k, b = off + k + 1;
      const double kd = 1.0 / h;
      const double md = h / 3.0, mo = h / 6.0;
      // stiffness minus potential
      ka.emplace_back(a, a, kd - di * md);
      ka.emplace_back(b, b, kd - di * md);
      ka.emplace_back(a, b, -kd - di * mo);
      ka.emplace_back(b, a, -kd - di * mo);
      ma.emplace_back(a, a, md);
      ma.emplace_back(b, b, md);
      ma.emplace_back(a, b, mo);
      ma.emplace_back(b, a, mo);
    }
  }
  Eigen::SparseMatrix<double> Af(full, full), Mf(full, full);
  Af.setFromTriplets(ka.begin(), ka.end());
  Mf.setFromTriplets(ma.begin(), ma.end());

  Reduction red;
  auto endpoint_node = [&](const ArcEndRef& e) {
    const int ai = net.arc_index(e.arc_id);
    return sys.arc_node_offset[ai] + (e.end == Endpoint::Start ? 0 : m);
  };
  // Arc-interior nodes first.
  for (int i = 0; i < E; ++i) {
    for (int k = 1; k < m; ++k) {
      red.z.emplace_back(sys.arc_node_offset[i] + k, red.reduced++, 1.0);
    }
  }
  // One block of V1 coordinates per interior vertex; boundary ends stay zero.
  for (const auto& v : net.vertices()) {
    if (v.boundary) continue;
    const auto& entry = prob.spaces.at(v.id);
    const int j = static_cast<int>(v.ends.size());
    const int k = static_cast<int>(entry.B1.cols());
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < j; ++r) {
        red.z.emplace_back(endpoint_node(v.ends[r]), red.reduced + c,
                           entry.B1(r, c));
      }
    }
    red.reduced += k;
  }

  Eigen::SparseMatrix<double> Z(full, red.reduced);
  Z.setFromTriplets(red.z.begin(), red.z.end());
  sys.Z = Z;
  sys.A = Z.transpose() * Af * Z;
  sys.Mass = Z.transpose() * Mf * Z;
  sys.spd_shift = prob.max_d() + 1.0;
  return sys;
}

namespace {

std::vector<double> dense_pencil_eigs(const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& M, int count) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, M);
  const int n = static_cast<int>(eig.eigenvalues().size());
  std::vector<double> out;
  for (int i = 0; i < std::min(n, count); ++i) out.push_back(eig.eigenvalues()(i));
  return out;
}

// Block inverse subspace iteration with the SPD shift; Rayleigh-Ritz at every
// step. Deterministic start, converges geometrically for the low end.
std::vector<double> sparse_lowest_eigs(const FemSystem& sys, int count) {
  const int n = static_cast<int>(sys.A.rows());
  const int p = std::min(n, std::max(2 * count, count + 12));
  Eigen::SparseMatrix<double> B = sys.A + sys.spd_shift * sys.Mass;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(B);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fem_eigenvalues: factorization failed");
  }

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);
  }

  Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, 1e300);
  std::vector<double> out;
  for (int iter = 0; iter < 400; ++iter) {
    Eigen::MatrixXd Y = solver.solve(sys.Mass * X);
    // Mass-orthonormalize through the small Gram eigendecomposition.
    Eigen::MatrixXd G = Y.transpose() * (sys.Mass * Y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> geig(G);
    Eigen::MatrixXd T(p, p);
    for (int c = 0; c < p; ++c) {
      const double ev = std::max(geig.eigenvalues()(c), 1e-300);
      T.col(c) = geig.eigenvectors().col(c) / std::sqrt(ev);
    }
    Y = Y * T;
    Eigen::MatrixXd H = Y.transpose() * (sys.A * Y);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> heig(H);
    X = Y * heig.eigenvectors();

    const int keep = std::min(count, p);
    Eigen::VectorXd ritz = heig.eigenvalues().head(keep);
    if (((ritz - prev.head(keep)).cwiseAbs().array() <=
         1e-12 * (1.0 + ritz.cwiseAbs().array()))
            .all()) {
      out.assign(ritz.data(), ritz.data() + keep);
      return out;
    }
    prev.head(keep) = ritz;
  }
  throw std::runtime_error("fem_eigenvalues: subspace iteration did not converge");
}

}  // namespace

std::vector<double> fem_eigenvalues(const FemSystem& sys, int count) {
  const int n = static_cast<int>(sys.A.rows());
  count = std::min(count, n);
  if (count <= 0) return {};
  if (n <= 500) {
    return dense_pencil_eigs(Eigen::MatrixXd(sys.A), Eigen::MatrixXd(sys.Mass),
                             count);
  }
  return sparse_lowest_eigs(sys, count);
}

std::vector<double> fem_oracle(const SpectralProblem& prob, int segments,
                               int count) {
  return fem_eigenvalues(fem_assemble(prob, segments), count);
}

Eigen::VectorXd fem_load(const FemSystem& sys, const Network& net,
                         const NetworkFunction& f) {
  const int full = static_cast<int>(sys.Z.rows());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(full);
  const int m = sys.segments;
  // Two-point Gauss per element, exact enough for smooth sources.
  const double g1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double g2 = 0.5 + std::sqrt(3.0) / 6.0;
  for (int i = 0; i < net.num_arcs(); ++i) {
    const double h = net.arcs()[i].arc.length / m;
    const int off = sys.arc_node_offset[i];
    for (int k = 0; k < m; ++k) {
      const double s0 = k * h;
      for (double t : {g1, g2}) {
        const double w = h / 2.0;
        const double fs = f.arcs[i].value(s0 + t * h);
        b(off + k) += w * fs * (1.0 - t);
        b(off + k + 1) += w * fs * t;
      }
    }
  }
  return sys.Z.transpose() * b;
}

double fem_shifted_energy_min(const FemSystem& sys, double sigma,
                              const Eigen::VectorXd& load) {
  Eigen::SparseMatrix<double> B = sys.A + sigma * sys.Mass;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(B);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fem_shifted_energy_min: factorization failed");
  }
  const Eigen::VectorXd v = solver.solve(-load);
  return 0.5 * v.dot(B * v) + v.dot(load);
}

}  // namespace geonet
