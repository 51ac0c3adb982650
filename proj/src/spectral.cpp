#include "geonet/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "geonet/fem.hpp"
#include "secular_internal.hpp"

namespace geonet {

namespace detail {

SecularSystem assemble_system(const SpectralProblem& prob,
                              const Eigen::VectorXd& mu,
                              const std::vector<ArcFunction>* particular,
                              const Eigen::VectorXd* boundary_g) {
  const Network& net = prob.net;
  const int E = net.num_arcs();
  SecularSystem sys;
  sys.boundary = [&] {
    std::vector<int> bids;
    for (const auto& v : net.vertices()) {
      if (v.boundary) bids.push_back(v.id);
    }
    return TraceSpace::over(net, bids);
  }();
  sys.dirichlet_row.assign(sys.boundary.dim(), -1);

  int rows = 0;
  for (const auto& v : net.vertices()) rows += static_cast<int>(v.ends.size());
  sys.M.setZero(rows, 2 * E);
  sys.rhs.setZero(rows);

  int row = 0;
  for (const auto& v : net.vertices()) {
    const int j = static_cast<int>(v.ends.size());
    // Affine end forms for every incident end.
    std::vector<EndForm> forms(j);
    std::vector<int> arc_idx(j);
    for (int r = 0; r < j; ++r) {
      const int ai = net.arc_index(v.ends[r].arc_id);
      arc_idx[r] = ai;
      forms[r] = end_form(net.arcs()[ai].arc, v.ends[r].end, mu(ai),
                          particular != nullptr ? &(*particular)[ai] : nullptr);
    }
    if (v.boundary) {
      for (int r = 0; r < j; ++r) {
        sys.M(row, 2 * arc_idx[r]) = forms[r].va;
        sys.M(row, 2 * arc_idx[r] + 1) = forms[r].vb;
        double g = 0.0;
        const int slot = sys.boundary.find(v.id, r);
        if (boundary_g != nullptr && slot >= 0) g = (*boundary_g)(slot);
        if (slot >= 0) sys.dirichlet_row[slot] = row;
        sys.rhs(row) = g - forms[r].vp;
        ++row;
      }
    } else {
      const auto& entry = prob.spaces.at(v.id);
      const int k = static_cast<int>(entry.B1.cols());
      // Value rows: B2^T values = 0.
      for (int c = 0; c < j - k; ++c) {
        double off = 0.0;
        for (int r = 0; r < j; ++r) {
          sys.M(row, 2 * arc_idx[r]) += entry.B2(r, c) * forms[r].va;
          sys.M(row, 2 * arc_idx[r] + 1) += entry.B2(r, c) * forms[r].vb;
          off += entry.B2(r, c) * forms[r].vp;
        }
        sys.rhs(row) = -off;
        ++row;
      }
      // Derivative rows: B1^T outward derivatives = 0.
      for (int c = 0; c < k; ++c) {
        double off = 0.0;
        for (int r = 0; r < j; ++r) {
          sys.M(row, 2 * arc_idx[r]) += entry.B1(r, c) * forms[r].da;
          sys.M(row, 2 * arc_idx[r] + 1) += entry.B1(r, c) * forms[r].db;
          off += entry.B1(r, c) * forms[r].dp;
        }
        sys.rhs(row) = -off;
        ++row;
      }
    }
  }
  return sys;
}

NetworkFunction coeffs_to_function(const SpectralProblem& prob,
                                   const Eigen::VectorXd& mu,
                                   const Eigen::VectorXd& x,
                                   const std::vector<ArcFunction>* particular) {
  NetworkFunction f = NetworkFunction::zero(prob.net);
  for (int i = 0; i < prob.net.num_arcs(); ++i) {
    f.arcs[i].modes.push_back({mu(i), x(2 * i), x(2 * i + 1)});
    if (particular != nullptr) {
      for (const auto& m : (*particular)[i].modes) f.arcs[i].modes.push_back(m);
    }
    f.arcs[i].compress(0.0);
  }
  return f;
}

ArcFunction particular_solution(double mu, const ArcFunction& source) {
  ArcFunction up;
  for (const auto& m : source.modes) {
    const double denom = mu - m.mu;
    if (std::abs(denom) < 1e-6) {
      throw std::invalid_argument(
          "particular_solution: source mode parameter too close to the "
          "homogeneous parameter");
    }
    // u'' + mu u = C(nu, .) is solved by (C(nu,.) - C(mu,.)) / (mu - nu).
    up.modes.push_back({m.mu, m.A / denom, m.B / denom});
    up.modes.push_back({mu, -m.A / denom, -m.B / denom});
  }
  up.compress(0.0);
  return up;
}

std::vector<NetworkFunction> l2_orthonormalize(const Network& net,
                                               std::vector<NetworkFunction> fns,
                                               double drop_tol) {
  const int n = static_cast<int>(fns.size());
  if (n == 0) return fns;
  Eigen::MatrixXd G(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      G(a, b) = G(b, a) = l2_inner_product(net, fns[a], fns[b]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  std::vector<NetworkFunction> out;
  for (int c = n - 1; c >= 0; --c) {
    const double val = eig.eigenvalues()(c);
    if (val <= drop_tol * drop_tol * (1.0 + top) || val <= 0.0) continue;
    const Eigen::VectorXd w = eig.eigenvectors().col(c) / std::sqrt(val);
    NetworkFunction g = NetworkFunction::zero(net);
    for (int a = 0; a < n; ++a) {
      for (size_t i = 0; i < g.arcs.size(); ++i) {
        for (const auto& m : fns[a].arcs[i].modes) {
          g.arcs[i].modes.push_back({m.mu, w(a) * m.A, w(a) * m.B});
        }
      }
    }
    for (auto& af : g.arcs) af.compress(0.0);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

using detail::assemble_system;

SpectralProblem SpectralProblem::make(Network net, double d_all) {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(net.num_arcs(), d_all);
  return make(std::move(net), std::move(d));
}

SpectralProblem SpectralProblem::make(Network net, Eigen::VectorXd d_per_arc) {
  if (d_per_arc.size() != net.num_arcs()) {
    throw std::invalid_argument("SpectralProblem: potential size mismatch");
  }
  SpectralProblem p;
  p.spaces = vertex_spaces(net);
  p.net = std::move(net);
  p.d = std::move(d_per_arc);
  return p;
}

Eigen::MatrixXd secular_matrix(const SpectralProblem& prob, double lambda) {
  const Eigen::VectorXd mu = prob.d.array() + lambda;
  return assemble_system(prob, mu, nullptr, nullptr).M;
}

int Spectrum::total_multiplicity() const {
  int n = 0;
  for (const auto& c : clusters) n += c.multiplicity;
  return n;
}

std::vector<double> Spectrum::flat() const {
  std::vector<double> out;
  for (const auto& c : clusters) {
    out.insert(out.end(), c.multiplicity, c.lambda);
  }
  return out;
}

namespace {

int scan_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GEONET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(4u, hw == 0 ? 1u : hw));
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

double sigma_min(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Golden-section minimization of sigma_min(M(lambda)) over [a, b].
double golden_polish(const SpectralProblem& prob, double a, double b, double tol) {
  auto f = [&](double x) { return sigma_min(secular_matrix(prob, x)); };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

struct ScanHit {
  double lambda;
  int multiplicity;
};

// One scan pass at the given step: grid sweep, bracket local minima, refine
// the bracket by 10x, polish each sub-minimum, classify by SVD.
std::vector<ScanHit> scan_pass(const SpectralProblem& prob, double lo, double hi,
                               double step, const ScanOptions& opts,
                               std::vector<std::pair<double, Eigen::MatrixXd>>* kernels) {
  const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / step)) + 1);
  std::vector<double> grid(n), val(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * i / (n - 1);
  }
  const int threads = scan_thread_count(opts.threads);
  parallel_for(n, threads, [&](int i) {
    val[i] = sigma_min(secular_matrix(prob, grid[i]));
  });

  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || val[i] <= val[i - 1];
    const bool right_ok = i == n - 1 || val[i] <= val[i + 1];
    if (left_ok && right_ok) {
      brackets.emplace_back(grid[std::max(0, i - 1)], grid[std::min(n - 1, i + 1)]);
    }
  }

  std::vector<double> candidates;
  for (const auto& [a, b] : brackets) {
    // Refine the bracket tenfold to separate nearby roots, then polish each
    // refined local minimum.
    const int m = 21;
    std::vector<double> g2(m), v2(m);
    for (int i = 0; i < m; ++i) {
      g2[i] = a + (b - a) * i / (m - 1);
    }
    parallel_for(m, threads, [&](int i) {
      v2[i] = sigma_min(secular_matrix(prob, g2[i]));
    });
    for (int i = 0; i < m; ++i) {
      const bool left_ok = i == 0 || v2[i] <= v2[i - 1];
      const bool right_ok = i == m - 1 || v2[i] <= v2[i + 1];
      if (left_ok && right_ok) {
        candidates.push_back(golden_polish(prob, g2[std::max(0, i - 1)],
                                           g2[std::min(m - 1, i + 1)],
                                           opts.polish_tol * 0.1));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<ScanHit> hits;
  for (double lam : candidates) {
    if (!hits.empty() && std::abs(lam - hits.back().lambda) < 1e-9) continue;
    const Eigen::MatrixXd M = secular_matrix(prob, lam);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    if (sv(sv.size() - 1) > opts.zero_sv_rel * smax) continue;
    int mult = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) < opts.mult_sv_rel * smax) ++mult;
    }
    hits.push_back({lam, mult});
    if (kernels != nullptr) {
      kernels->emplace_back(lam, svd.matrixV().rightCols(mult));
    }
  }
  return hits;
}

std::vector<NetworkFunction> kernel_to_functions(const SpectralProblem& prob,
                                                 double lambda,
                                                 const Eigen::MatrixXd& V) {
  const Eigen::VectorXd mu = prob.d.array() + lambda;
  std::vector<NetworkFunction> fns;
  for (int c = 0; c < V.cols(); ++c) {
    fns.push_back(detail::coeffs_to_function(prob, mu, V.col(c), nullptr));
  }
  return detail::l2_orthonormalize(prob.net, std::move(fns), 1e-10);
}

}  // namespace

Spectrum eigenvalues(const SpectralProblem& prob, double lo, double hi,
                     const ScanOptions& opts) {
  Spectrum out;
  const double floor_lambda = -prob.max_d() - 1e-9;
  if (lo < floor_lambda) {
    out.warnings.push_back("window clipped at the spectral floor -max(d)");
    lo = floor_lambda;
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("eigenvalues: empty window");
  }

  double step = opts.coarse_step;
  std::vector<std::pair<double, Eigen::MatrixXd>> kernels;
  std::vector<ScanHit> hits = scan_pass(prob, lo, hi, step, opts, &kernels);

  if (opts.fem_check) {
    // Count reconciliation against the FEM upper bounds, over a comparison
    // interval whose edges are pushed away from any value that sits within
    // `guard` of them (those are ambiguous for the O(1/m^2) FEM values).
    const double guard = 5e-3;
    int want = 40;
    std::vector<double> fem = fem_oracle(prob, opts.fem_segments, want);
    // The list must reach past the window or the below-cutoff count is wrong.
    while (static_cast<int>(fem.size()) == want && fem.back() < hi + guard &&
           want < 320) {
      want *= 2;
      fem = fem_oracle(prob, opts.fem_segments, want);
    }
    std::vector<double> values = fem;
    for (const auto& h : hits) values.push_back(h.lambda);
    std::sort(values.begin(), values.end());
    double locut = lo;
    // At the spectral floor nothing exists below lo, so the lower edge is
    // unambiguous; a partial window may have eigenvalues just outside whose
    // FEM upper bounds spill in, so push the edge past any nearby value.
    if (lo > floor_lambda + 1e-12) {
      for (double v : values) {
        if (v >= locut - guard && v < locut + guard) locut = v + guard;
      }
    }
    double hicut = hi;
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
      if (*it <= hicut + guard && *it > hicut - guard) hicut = *it - guard;
    }
    auto fem_count = [&](const std::vector<double>& f) {
      return static_cast<int>(std::count_if(f.begin(), f.end(), [&](double x) {
        return x >= locut && x < hicut;
      }));
    };
    auto secular_count = [&](const std::vector<ScanHit>& hs) {
      int c = 0;
      for (const auto& h : hs) {
        if (h.lambda >= locut && h.lambda < hicut) c += h.multiplicity;
      }
      return c;
    };
    if (secular_count(hits) != fem_count(fem)) {
      kernels.clear();
      hits = scan_pass(prob, lo, hi, step / 10.0, opts, &kernels);
      if (secular_count(hits) != fem_count(fem)) {
        throw std::runtime_error(
            "eigenvalues: secular count " + std::to_string(secular_count(hits)) +
            " disagrees with FEM count " + std::to_string(fem_count(fem)) +
            " in [" + std::to_string(locut) + ", " + std::to_string(hicut) + ")");
      }
      out.warnings.push_back("scan refined tenfold to reconcile counts");
    }
  }

  for (size_t i = 0; i < hits.size(); ++i) {
    EigenvalueCluster c;
    c.lambda = hits[i].lambda;
    c.multiplicity = hits[i].multiplicity;
    c.eigenfunctions = kernel_to_functions(prob, hits[i].lambda, kernels[i].second);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

IndexNullity index_nullity(const SpectralProblem& prob, const ScanOptions& opts) {
  const Spectrum spec =
      eigenvalues(prob, -prob.max_d() - 1e-9, 0.5, opts);
  IndexNullity out;
  out.warnings = spec.warnings;
  for (const auto& c : spec.clusters) {
    if (c.lambda < -opts.zero_band) {
      out.index += c.multiplicity;
    } else if (c.lambda <= opts.zero_band) {
      out.nullity += c.multiplicity;
    }
    if (std::abs(c.lambda) > opts.zero_band &&
        std::abs(c.lambda) < 10.0 * opts.zero_band) {
      out.warnings.push_back("eigenvalue " + std::to_string(c.lambda) +
                             " lies in the tolerance ambiguity band");
    }
  }
  return out;
}

std::vector<NetworkFunction> locally_constant_space(const Network& net) {
  const VertexSpaces spaces = vertex_spaces(net);
  const int E = net.num_arcs();
  // Stack the V1 membership conditions on the per-arc constants; boundary
  // vertices force their incident constants to zero.
  std::vector<Eigen::RowVectorXd> rows;
  for (const auto& v : net.vertices()) {
    const int j = static_cast<int>(v.ends.size());
    if (v.boundary) {
      for (const auto& e : v.ends) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(E);
        r(net.arc_index(e.arc_id)) = 1.0;
        rows.push_back(r);
      }
      continue;
    }
    const auto& entry = spaces.at(v.id);
    for (int c = 0; c < entry.B2.cols(); ++c) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(E);
      for (int rj = 0; rj < j; ++rj) {
        r(net.arc_index(v.ends[rj].arc_id)) += entry.B2(rj, c);
      }
      rows.push_back(r);
    }
  }
  Eigen::MatrixXd C(rows.size(), E);
  for (size_t i = 0; i < rows.size(); ++i) C.row(i) = rows[i];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * std::max(smax, 1.0)) ++rank;
  }
  std::vector<NetworkFunction> fns;
  for (int c = rank; c < E; ++c) {
    std::vector<ArcMode> modes(E);
    for (int i = 0; i < E; ++i) modes[i] = {0.0, svd.matrixV()(i, c), 0.0};
    fns.push_back(NetworkFunction::single_mode(net, modes));
  }
  return detail::l2_orthonormalize(net, std::move(fns), 1e-10);
}

std::vector<NetworkFunction> rotation_nullspace(const Network& net) {
  if (!net.closed()) {
    throw std::invalid_argument("rotation_nullspace: network must be closed");
  }
  std::vector<NetworkFunction> fns;
  for (const Vec3& axis : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}) {
    RotationField field{axis, 1.0};
    std::vector<ArcMode> modes(net.num_arcs());
    for (int i = 0; i < net.num_arcs(); ++i) {
      const auto [A, B] = rotation_normal_trace(field, net.arcs()[i].arc);
      modes[i] = {1.0, A, B};
    }
    NetworkFunction f = NetworkFunction::single_mode(net, modes);
    if (l2_norm(net, f) < 1e-10) continue;
    fns.push_back(std::move(f));
  }
  fns = detail::l2_orthonormalize(net, std::move(fns), 1e-8);

  // Each member must satisfy the lambda = 0 vertex conditions.
  const SpectralProblem prob = SpectralProblem::make(net);
  const Eigen::MatrixXd M = secular_matrix(prob, 0.0);
  for (const auto& f : fns) {
    Eigen::VectorXd x(2 * net.num_arcs());
    for (int i = 0; i < net.num_arcs(); ++i) {
      double A = 0.0, B = 0.0;
      for (const auto& m : f.arcs[i].modes) {
        A += m.A;
        B += m.B;
      }
      x(2 * i) = A;
      x(2 * i + 1) = B;
    }
    const double res = (M * x).norm() / std::max(x.norm(), 1e-300);
    if (res > 1e-8) {
      throw std::runtime_error(
          "rotation_nullspace: rotation trace fails the vertex conditions "
          "(residual " + std::to_string(res) + "); network not stationary?");
    }
  }
  return fns;
}

NetworkFunction shifted_solve(const SpectralProblem& prob, double sigma,
                              const NetworkFunction& f) {
  const int E = prob.net.num_arcs();
  if (static_cast<int>(f.arcs.size()) != E) {
    throw std::invalid_argument("shifted_solve: source arc count mismatch");
  }
  const Eigen::VectorXd mu = prob.d.array() - sigma;
  std::vector<ArcFunction> particular(E);
  for (int i = 0; i < E; ++i) {
    particular[i] = detail::particular_solution(mu(i), f.arcs[i]);
  }
  detail::SecularSystem sys = assemble_system(prob, mu, &particular, nullptr);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.M,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * sv(0)) {
    throw std::runtime_error(
        "shifted_solve: system singular; sigma is not in the coercive range");
  }
  const Eigen::VectorXd x = svd.solve(sys.rhs);
  return detail::coeffs_to_function(prob, mu, x, &particular);
}

std::vector<NetworkFunction> secular_kernel(const SpectralProblem& prob,
                                            double lambda, double rel_tol) {
  const Eigen::MatrixXd M = secular_matrix(prob, lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  int mult = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) < rel_tol * smax) ++mult;
  }
  if (mult == 0) return {};
  return kernel_to_functions(prob, lambda, svd.matrixV().rightCols(mult));
}

std::vector<std::pair<double, double>> sigma_min_trace(
    const SpectralProblem& prob, double lo, double hi, double step) {
  std::vector<std::pair<double, double>> out;
  const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / step)) + 1);
  for (int i = 0; i < n; ++i) {
    const double lam = lo + (hi - lo) * i / (n - 1);
    out.emplace_back(lam, sigma_min(secular_matrix(prob, lam)));
  }
  return out;
}

}  // namespace geonet
