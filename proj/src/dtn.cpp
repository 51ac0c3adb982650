#include "geonet/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "secular_internal.hpp"

namespace geonet {

namespace {

// Orthonormal basis of the orthogonal complement of range(U) in R^n.
Eigen::MatrixXd orthonormal_complement(int n, const Eigen::MatrixXd& U) {
  if (U.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(n - U.cols());
}

// Intersection of two subspaces given by orthonormal bases, through the
// eigen-decomposition of the sum of their orthogonal projectors: directions
// with eigenvalue 2 lie in both.
Eigen::MatrixXd intersect_subspaces(const Eigen::MatrixXd& U,
                                    const Eigen::MatrixXd& W, double tol = 1e-8) {
  const int n = static_cast<int>(U.rows());
  if (U.cols() == 0 || W.cols() == 0) return Eigen::MatrixXd(n, 0);
  Eigen::MatrixXd K = U * U.transpose() + W * W.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (eig.eigenvalues()(i) > 2.0 - tol) ++count;
  }
  return eig.eigenvectors().rightCols(count);
}

Eigen::VectorXd map_boundary_data(const detail::SecularSystem& sys,
                                  const Network& net, const TraceSpace& qt,
                                  const Eigen::VectorXd& g) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.boundary.dim());
  for (int i = 0; i < qt.dim(); ++i) {
    const int slot = sys.boundary.find(qt.slots[i].vertex_id, qt.slots[i].end_ordinal);
    if (slot < 0) {
      throw std::invalid_argument("boundary subset slot missing from the boundary");
    }
    full(slot) = g(i);
  }
  return full;
}

}  // namespace

DirichletResult dirichlet_solve(const SpectralProblem& prob,
                                const Eigen::VectorXd& g,
                                const NetworkFunction* f) {
  const Network& net = prob.net;
  const int E = net.num_arcs();
  const Eigen::VectorXd mu = prob.d;  // lambda = 0

  std::vector<ArcFunction> particular(E);
  if (f != nullptr) {
    for (int i = 0; i < E; ++i) {
      particular[i] = detail::particular_solution(mu(i), f->arcs[i]);
    }
  }
  detail::SecularSystem sys = detail::assemble_system(
      prob, mu, f != nullptr ? &particular : nullptr, nullptr);
  if (g.size() != sys.boundary.dim()) {
    throw std::invalid_argument("dirichlet_solve: boundary data size mismatch");
  }
  for (int s = 0; s < sys.boundary.dim(); ++s) {
    sys.rhs(sys.dirichlet_row[s]) += g(s);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.M,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const bool singular = sv(sv.size() - 1) < 1e-7 * smax;

  const double scale = 1.0 + g.cwiseAbs().maxCoeff() +
                       (f != nullptr ? l2_norm(net, *f) : 0.0);
  std::vector<NetworkFunction> j00;
  if (singular) {
    j00 = secular_kernel(prob, 0.0);
    ObstructionReport rep;
    rep.tolerance = 1e-8 * scale;
    bool blocked = false;
    for (const auto& v : j00) {
      double val = 0.0;
      if (f != nullptr) val += l2_inner_product(net, *f, v);
      const Eigen::VectorXd dv = trace_outward_derivatives(net, v, sys.boundary);
      val += g.dot(dv);
      rep.violations.push_back(val);
      if (std::abs(val) > rep.tolerance) blocked = true;
    }
    if (blocked) {
      DirichletResult res;
      res.obstruction = std::move(rep);
      return res;
    }
  }

  svd.setThreshold(1e-7);
  const Eigen::VectorXd x = svd.solve(sys.rhs);
  const double residual = (sys.M * x - sys.rhs).norm();
  if (residual > 1e-7 * scale) {
    throw std::runtime_error(
        "dirichlet_solve: inconsistent system despite passing obstruction check");
  }
  NetworkFunction u = detail::coeffs_to_function(
      prob, mu, x, f != nullptr ? &particular : nullptr);
  // Minimum L2-norm representative of the solution coset.
  for (const auto& v : j00) {
    const double c = l2_inner_product(net, u, v);
    for (int i = 0; i < E; ++i) {
      for (const auto& m : v.arcs[i].modes) {
        u.arcs[i].modes.push_back({m.mu, -c * m.A, -c * m.B});
      }
      u.arcs[i].compress(0.0);
    }
  }
  DirichletResult res;
  res.solution = std::move(u);
  return res;
}

NullTraceData null_trace_data(const SpectralProblem& prob,
                              const std::vector<int>& qtilde_ids) {
  for (int vid : qtilde_ids) {
    if (!prob.net.vertex_by_id(vid).boundary) {
      throw std::invalid_argument("null_trace_data: vertex " +
                                  std::to_string(vid) + " is not boundary");
    }
  }
  NullTraceData out;
  out.qt = TraceSpace::over(prob.net, qtilde_ids);
  out.j00 = secular_kernel(prob, 0.0);

  const int dim = out.qt.dim();
  const int n = out.dim_j00();
  Eigen::MatrixXd traces(dim, n);
  for (int a = 0; a < n; ++a) {
    traces.col(a) = trace_outward_derivatives(prob.net, out.j00[a], out.qt);
  }
  if (n == 0 || dim == 0) {
    out.dtrace_basis = Eigen::MatrixXd(dim, 0);
    out.dtrace_perp = Eigen::MatrixXd::Identity(dim, dim);
    out.i0 = out.j00;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(traces,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * std::max(smax, 1.0)) ++rank;
  }
  out.dtrace_basis = svd.matrixU().leftCols(rank);
  out.dtrace_perp = svd.matrixU().rightCols(dim - rank);
  // Kernel combinations of the null basis have zero trace; the j00 basis is
  // L2-orthonormal and V is orthogonal, so these stay orthonormal.
  for (int c = rank; c < n; ++c) {
    NetworkFunction w = NetworkFunction::zero(prob.net);
    for (int a = 0; a < n; ++a) {
      const double coef = svd.matrixV()(a, c);
      for (size_t i = 0; i < w.arcs.size(); ++i) {
        for (const auto& m : out.j00[a].arcs[i].modes) {
          w.arcs[i].modes.push_back({m.mu, coef * m.A, coef * m.B});
        }
      }
    }
    for (auto& af : w.arcs) af.compress(0.0);
    out.i0.push_back(std::move(w));
  }
  return out;
}

NetworkFunction l_extension(const SpectralProblem& prob,
                            const NullTraceData& data, const Eigen::VectorXd& g) {
  const Network& net = prob.net;
  const int E = net.num_arcs();
  if (g.size() != data.qt.dim()) {
    throw std::invalid_argument("l_extension: data size mismatch");
  }
  const double gscale = 1.0 + g.norm();
  if (data.dtrace_basis.cols() > 0 &&
      (data.dtrace_basis.transpose() * g).norm() > 1e-9 * gscale) {
    throw std::invalid_argument(
        "l_extension: g is not orthogonal to the derivative trace space");
  }

  const Eigen::VectorXd mu = prob.d;
  detail::SecularSystem sys = detail::assemble_system(prob, mu, nullptr, nullptr);
  const Eigen::VectorXd gfull = map_boundary_data(sys, net, data.qt, g);
  for (int s = 0; s < sys.boundary.dim(); ++s) {
    sys.rhs(sys.dirichlet_row[s]) += gfull(s);
  }

  const int extra = static_cast<int>(data.dtrace_basis.cols()) +
                    static_cast<int>(data.i0.size());
  Eigen::MatrixXd M(sys.M.rows() + extra, 2 * E);
  Eigen::VectorXd rhs(sys.rhs.size() + extra);
  M.topRows(sys.M.rows()) = sys.M;
  rhs.head(sys.rhs.size()) = sys.rhs;
  int row = static_cast<int>(sys.M.rows());

  // Derivative trace orthogonal to D_tau J00(Qtilde).
  for (int c = 0; c < data.dtrace_basis.cols(); ++c) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * E);
    for (int s = 0; s < data.qt.dim(); ++s) {
      const Vertex& v = net.vertex_by_id(data.qt.slots[s].vertex_id);
      const auto& e = v.ends[data.qt.slots[s].end_ordinal];
      const int ai = net.arc_index(e.arc_id);
      const auto form = detail::end_form(net.arcs()[ai].arc, e.end, mu(ai), nullptr);
      r(2 * ai) += data.dtrace_basis(s, c) * form.da;
      r(2 * ai + 1) += data.dtrace_basis(s, c) * form.db;
    }
    M.row(row) = r;
    rhs(row) = 0.0;
    ++row;
  }

  // L2 orthogonality to I0(Qtilde).
  for (const auto& v : data.i0) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * E);
    for (int i = 0; i < E; ++i) {
      NetworkFunction probe = NetworkFunction::zero(net);
      probe.arcs[i].modes = {{mu(i), 1.0, 0.0}};
      r(2 * i) = l2_inner_product(net, probe, v);
      probe.arcs[i].modes = {{mu(i), 0.0, 1.0}};
      r(2 * i + 1) = l2_inner_product(net, probe, v);
    }
    M.row(row) = r;
    rhs(row) = 0.0;
    ++row;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd x = svd.solve(rhs);
  const double residual = (M * x - rhs).norm();
  if (residual > 1e-8 * gscale) {
    throw std::runtime_error("l_extension: extension system residual " +
                             std::to_string(residual));
  }
  return detail::coeffs_to_function(prob, mu, x, nullptr);
}

MatrixInertia DtnMap::inertia(double zero_tol_rel) const {
  MatrixInertia out;
  const double scale =
      eigenvalues.size() > 0 ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double tol = zero_tol_rel * (1.0 + scale);
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) < -tol) {
      ++out.negative;
    } else if (eigenvalues(i) > tol) {
      ++out.positive;
    } else {
      ++out.zero;
    }
  }
  return out;
}

DtnMap dtn_map(const SpectralProblem& prob, const NullTraceData& data) {
  DtnMap map;
  map.space = data.qt;
  map.basis = data.dtrace_perp;
  const int r = static_cast<int>(map.basis.cols());
  map.matrix.setZero(r, r);
  for (int k = 0; k < r; ++k) {
    const NetworkFunction u = l_extension(prob, data, map.basis.col(k));
    const Eigen::VectorXd t = trace_outward_derivatives(prob.net, u, data.qt);
    map.matrix.col(k) = map.basis.transpose() * t;
  }
  if (r == 0) {
    map.eigenvalues = Eigen::VectorXd(0);
    map.eigenvectors = Eigen::MatrixXd(0, 0);
    return map;
  }
  const double asym = (map.matrix - map.matrix.transpose()).cwiseAbs().maxCoeff();
  const double scale = 1.0 + map.matrix.cwiseAbs().maxCoeff();
  if (asym > 1e-7 * scale) {
    throw std::runtime_error("dtn_map: asymmetry " + std::to_string(asym) +
                             " violates self-adjointness");
  }
  map.matrix = (0.5 * (map.matrix + map.matrix.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(map.matrix);
  map.eigenvalues = eig.eigenvalues();
  map.eigenvectors = eig.eigenvectors();
  return map;
}

DtnMap dtn_map(const SpectralProblem& prob, const std::vector<int>& qtilde_ids) {
  return dtn_map(prob, null_trace_data(prob, qtilde_ids));
}

// --- partitions --------------------------------------------------------------

Partition Partition::make(const Network& parent,
                          std::vector<std::vector<int>> piece_arc_ids,
                          std::vector<int> cut_ids) {
  Partition part;
  part.parent = parent;
  std::sort(cut_ids.begin(), cut_ids.end());
  part.cut_ids = cut_ids;
  part.piece_arc_ids = std::move(piece_arc_ids);

  std::set<int> cuts(cut_ids.begin(), cut_ids.end());
  if (cuts.size() != cut_ids.size()) {
    throw std::invalid_argument("Partition: duplicate cut vertex");
  }
  for (int vid : cuts) {
    if (parent.vertex_by_id(vid).boundary) {
      throw std::invalid_argument("Partition: cut vertex must be interior");
    }
  }
  std::map<int, int> arc_piece;
  for (size_t p = 0; p < part.piece_arc_ids.size(); ++p) {
    if (part.piece_arc_ids[p].empty()) {
      throw std::invalid_argument("Partition: empty piece");
    }
    for (int aid : part.piece_arc_ids[p]) {
      parent.arc_index(aid);
      if (!arc_piece.emplace(aid, static_cast<int>(p)).second) {
        throw std::invalid_argument("Partition: arc in more than one piece");
      }
    }
  }
  if (static_cast<int>(arc_piece.size()) != parent.num_arcs()) {
    throw std::invalid_argument("Partition: pieces do not cover all arcs");
  }
  for (const auto& v : parent.vertices()) {
    if (cuts.count(v.id) > 0) continue;
    std::set<int> touched;
    for (const auto& e : v.ends) touched.insert(arc_piece.at(e.arc_id));
    if (touched.size() > 1) {
      throw std::invalid_argument(
          "Partition: vertex " + std::to_string(v.id) +
          " joins several pieces but is not in the cut set");
    }
  }

  part.cut_space = TraceSpace::over(parent, part.cut_ids);

  for (const auto& group : part.piece_arc_ids) {
    std::set<int> vids;
    std::vector<NetworkArc> arcs;
    for (int aid : group) {
      const NetworkArc& na = parent.arc_by_id(aid);
      arcs.push_back(na);
      vids.insert(na.start_vertex);
      vids.insert(na.end_vertex);
    }
    std::vector<Vertex> verts;
    std::vector<int> qtilde;
    for (int vid : vids) {
      Vertex v = parent.vertex_by_id(vid);
      v.ends.clear();
      if (cuts.count(vid) > 0) {
        v.boundary = true;
        qtilde.push_back(vid);
      }
      verts.push_back(v);
    }
    BuildOptions opts;
    opts.check_embedded = false;  // subset of an already validated network
    Network piece = Network::build(std::move(verts), std::move(arcs), opts);

    const TraceSpace ts = TraceSpace::over(piece, qtilde);
    std::vector<int> slot_map(ts.dim());
    for (int s = 0; s < ts.dim(); ++s) {
      const Vertex& pv = piece.vertex_by_id(ts.slots[s].vertex_id);
      const ArcEndRef& e = pv.ends[ts.slots[s].end_ordinal];
      const Vertex& parentv = parent.vertex_by_id(ts.slots[s].vertex_id);
      int parent_ord = -1;
      for (size_t q = 0; q < parentv.ends.size(); ++q) {
        if (parentv.ends[q].arc_id == e.arc_id && parentv.ends[q].end == e.end) {
          parent_ord = static_cast<int>(q);
          break;
        }
      }
      slot_map[s] = part.cut_space.find(ts.slots[s].vertex_id, parent_ord);
      if (slot_map[s] < 0) {
        throw std::logic_error("Partition: slot mapping failed");
      }
    }
    part.pieces.push_back(std::move(piece));
    part.piece_qtilde_ids.push_back(std::move(qtilde));
    part.piece_slot_to_parent.push_back(std::move(slot_map));
  }
  return part;
}

Partition Partition::trivial(const Network& parent) {
  std::vector<int> all;
  for (const auto& na : parent.arcs()) all.push_back(na.id);
  return make(parent, {all}, {});
}

Partition Partition::by_cuts(const Network& parent, std::vector<int> cut_ids) {
  std::set<int> cuts(cut_ids.begin(), cut_ids.end());
  // Union-find over arcs, joined at every non-cut vertex.
  std::map<int, int> up;
  for (const auto& na : parent.arcs()) up[na.id] = na.id;
  std::function<int(int)> find = [&](int a) {
    while (up[a] != a) a = up[a] = up[up[a]];
    return a;
  };
  for (const auto& v : parent.vertices()) {
    if (cuts.count(v.id) > 0) continue;
    for (size_t i = 1; i < v.ends.size(); ++i) {
      up[find(v.ends[i].arc_id)] = find(v.ends[0].arc_id);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (const auto& na : parent.arcs()) groups[find(na.id)].push_back(na.id);
  std::vector<std::vector<int>> piece_arcs;
  for (auto& [root, ids] : groups) piece_arcs.push_back(std::move(ids));
  return make(parent, std::move(piece_arcs), std::move(cut_ids));
}

// --- gluing ------------------------------------------------------------------

namespace {

Eigen::MatrixXd embed_columns(int n, const Eigen::MatrixXd& local,
                              const std::vector<int>& slot_map) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, local.cols());
  for (int r = 0; r < local.rows(); ++r) {
    out.row(slot_map[r]) = local.row(r);
  }
  return out;
}

}  // namespace

GluedDtn glued_dtn(const Partition& part, double d_all) {
  GluedDtn out;
  const int n = part.cut_space.dim();

  std::vector<Eigen::MatrixXd> perp_embedded, dtr_embedded;
  for (int p = 0; p < part.num_pieces(); ++p) {
    SpectralProblem piece_prob = SpectralProblem::make(part.pieces[p], d_all);
    NullTraceData ntd = null_trace_data(piece_prob, part.piece_qtilde_ids[p]);
    DtnMap tmap = dtn_map(piece_prob, ntd);
    perp_embedded.push_back(
        embed_columns(n, ntd.dtrace_perp, part.piece_slot_to_parent[p]));
    dtr_embedded.push_back(
        embed_columns(n, ntd.dtrace_basis, part.piece_slot_to_parent[p]));
    out.piece_data.push_back(std::move(ntd));
    out.piece_maps.push_back(std::move(tmap));
  }

  int perp_total = 0, dtr_total = 0;
  for (const auto& m : perp_embedded) perp_total += static_cast<int>(m.cols());
  for (const auto& m : dtr_embedded) dtr_total += static_cast<int>(m.cols());
  Eigen::MatrixXd U(n, perp_total), D(n, dtr_total);
  Eigen::MatrixXd That = Eigen::MatrixXd::Zero(perp_total, perp_total);
  {
    int uc = 0, dc = 0;
    for (int p = 0; p < part.num_pieces(); ++p) {
      const int rp = static_cast<int>(perp_embedded[p].cols());
      U.middleCols(uc, rp) = perp_embedded[p];
      That.block(uc, uc, rp, rp) = out.piece_maps[p].matrix;
      uc += rp;
      const int rd = static_cast<int>(dtr_embedded[p].cols());
      D.middleCols(dc, rd) = dtr_embedded[p];
      dc += rd;
    }
  }

  // V1(Pbar), V2(Pbar): block diagonal over the cut vertices of the parent.
  SpectralProblem parent_prob = SpectralProblem::make(part.parent, d_all);
  int v1_total = 0, v2_total = 0;
  for (int vid : part.cut_ids) {
    const auto& entry = parent_prob.spaces.at(vid);
    v1_total += static_cast<int>(entry.B1.cols());
    v2_total += static_cast<int>(entry.B2.cols());
  }
  Eigen::MatrixXd V1 = Eigen::MatrixXd::Zero(n, v1_total);
  Eigen::MatrixXd V2 = Eigen::MatrixXd::Zero(n, v2_total);
  {
    int row = 0, c1 = 0, c2 = 0;
    for (int vid : part.cut_ids) {
      const auto& entry = parent_prob.spaces.at(vid);
      const int j = static_cast<int>(entry.B1.rows());
      V1.block(row, c1, j, entry.B1.cols()) = entry.B1;
      V2.block(row, c2, j, entry.B2.cols()) = entry.B2;
      row += j;
      c1 += static_cast<int>(entry.B1.cols());
      c2 += static_cast<int>(entry.B2.cols());
    }
  }

  out.ledger.v1 = V1;
  out.ledger.v2 = V2;
  out.ledger.v1bar = intersect_subspaces(U, V1);
  out.ledger.v2bar = intersect_subspaces(U, V2);
  out.ledger.f1 = intersect_subspaces(D, V1);
  out.ledger.f2 = intersect_subspaces(D, V2);

  const auto& led = out.ledger;
  if (led.dim_v1bar() + led.dim_f1() != led.dim_v1() ||
      led.dim_v2bar() + led.dim_f2() != led.dim_v2() ||
      led.dim_v1bar() + led.dim_v2bar() + led.dim_f1() + led.dim_f2() != n) {
    throw std::runtime_error(
        "glued_dtn: ledger dimension identities failed (V1bar " +
        std::to_string(led.dim_v1bar()) + ", V2bar " +
        std::to_string(led.dim_v2bar()) + ", F1 " + std::to_string(led.dim_f1()) +
        ", F2 " + std::to_string(led.dim_f2()) + ", dim V(Pbar) " +
        std::to_string(n) + ")");
  }

  out.tbar.space = part.cut_space;
  out.tbar.basis = led.v1bar;
  const Eigen::MatrixXd& Y = led.v1bar;
  const int r = static_cast<int>(Y.cols());
  if (r == 0) {
    out.tbar.matrix = Eigen::MatrixXd(0, 0);
    out.tbar.eigenvalues = Eigen::VectorXd(0);
    out.tbar.eigenvectors = Eigen::MatrixXd(0, 0);
    return out;
  }
  // Tbar = Proj1 . That restricted to V1bar; in the Y basis this is
  // Y^T U That U^T Y, and the image must stay inside V1bar.
  const Eigen::MatrixXd TY = U * (That * (U.transpose() * Y));
  const Eigen::MatrixXd P1TY = V1 * (V1.transpose() * TY);
  out.closure_residual = (P1TY - Y * (Y.transpose() * P1TY)).norm();
  out.tbar.matrix = Y.transpose() * TY;
  const double asym =
      (out.tbar.matrix - out.tbar.matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-7 * (1.0 + out.tbar.matrix.cwiseAbs().maxCoeff())) {
    throw std::runtime_error("glued_dtn: glued map asymmetry " +
                             std::to_string(asym));
  }
  out.tbar.matrix = (0.5 * (out.tbar.matrix + out.tbar.matrix.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.tbar.matrix);
  out.tbar.eigenvalues = eig.eigenvalues();
  out.tbar.eigenvectors = eig.eigenvectors();
  return out;
}

std::vector<NetworkFunction> glued_extension(const Partition& part,
                                             const GluedDtn& glued,
                                             const Eigen::VectorXd& g) {
  if (g.size() != part.cut_space.dim()) {
    throw std::invalid_argument("glued_extension: data size mismatch");
  }
  std::vector<NetworkFunction> out;
  for (int p = 0; p < part.num_pieces(); ++p) {
    SpectralProblem piece_prob = SpectralProblem::make(part.pieces[p], 1.0);
    const auto& slot_map = part.piece_slot_to_parent[p];
    Eigen::VectorXd gp(slot_map.size());
    for (size_t s = 0; s < slot_map.size(); ++s) gp(s) = g(slot_map[s]);
    out.push_back(l_extension(piece_prob, glued.piece_data[p], gp));
  }
  return out;
}

// --- theorem verification ----------------------------------------------------

VerificationReport verify_partition(const Partition& part,
                                    const ScanOptions& opts, double d_all) {
  VerificationReport rep;

  SpectralProblem parent_prob = SpectralProblem::make(part.parent, d_all);
  const IndexNullity parent_in = index_nullity(parent_prob, opts);

  GluedDtn glued = glued_dtn(part, d_all);

  long sum_ind = 0, sum_nul = 0, sum_i0 = 0;
  for (int p = 0; p < part.num_pieces(); ++p) {
    SpectralProblem piece_prob = SpectralProblem::make(part.pieces[p], d_all);
    const IndexNullity in = index_nullity(piece_prob, opts);
    sum_ind += in.index;
    sum_nul += in.nullity;
    sum_i0 += glued.piece_data[p].dim_i0();
    const std::string tag = "piece" + std::to_string(p);
    rep.dims[tag + "_index"] = in.index;
    rep.dims[tag + "_nullity"] = in.nullity;
    rep.dims[tag + "_dim_i0"] = glued.piece_data[p].dim_i0();
    rep.dims[tag + "_dim_dtrace"] = glued.piece_data[p].dim_dtrace();
  }

  const MatrixInertia ti = glued.tbar.inertia();
  rep.dims["tbar_index"] = ti.negative;
  rep.dims["tbar_nullity"] = ti.zero;
  rep.dims["tbar_dim"] = glued.tbar.eigenvalues.size();
  rep.dims["dim_v1_cut"] = glued.ledger.dim_v1();
  rep.dims["dim_v2_cut"] = glued.ledger.dim_v2();
  rep.dims["dim_v1bar"] = glued.ledger.dim_v1bar();
  rep.dims["dim_v2bar"] = glued.ledger.dim_v2bar();
  rep.dims["dim_f1"] = glued.ledger.dim_f1();
  rep.dims["dim_f2"] = glued.ledger.dim_f2();
  rep.dims["parent_index"] = parent_in.index;
  rep.dims["parent_nullity"] = parent_in.nullity;

  rep.index_theorem.name = "index";
  rep.index_theorem.lhs = parent_in.index;
  rep.index_theorem.rhs = sum_ind + ti.negative + glued.ledger.dim_f1();
  rep.index_theorem.pass = rep.index_theorem.lhs == rep.index_theorem.rhs;
  rep.index_theorem.details = {{"sum_piece_index", sum_ind},
                               {"tbar_index", ti.negative},
                               {"dim_f1", glued.ledger.dim_f1()}};

  rep.nullity_theorem.name = "nullity";
  rep.nullity_theorem.lhs = parent_in.nullity;
  rep.nullity_theorem.rhs = ti.zero + glued.ledger.dim_f2() + sum_i0;
  rep.nullity_theorem.pass = rep.nullity_theorem.lhs == rep.nullity_theorem.rhs;
  rep.nullity_theorem.details = {{"tbar_nullity", ti.zero},
                                 {"dim_f2", glued.ledger.dim_f2()},
                                 {"sum_dim_i0", sum_i0}};

  rep.sum_corollary.name = "index-plus-nullity";
  rep.sum_corollary.lhs = parent_in.index + parent_in.nullity;
  rep.sum_corollary.rhs = sum_ind + sum_nul + ti.negative + ti.zero;
  rep.sum_corollary.pass = rep.sum_corollary.lhs == rep.sum_corollary.rhs;
  rep.sum_corollary.details = {{"sum_piece_index_nullity", sum_ind + sum_nul},
                               {"tbar_index_nullity", ti.negative + ti.zero}};

  rep.all_pass = rep.index_theorem.pass && rep.nullity_theorem.pass &&
                 rep.sum_corollary.pass;
  return rep;
}

TheoremReport verify_index_theorem(const Partition& part, const ScanOptions& opts) {
  return verify_partition(part, opts).index_theorem;
}

TheoremReport verify_nullity_theorem(const Partition& part,
                                     const ScanOptions& opts) {
  return verify_partition(part, opts).nullity_theorem;
}

TheoremReport verify_sum_corollary(const Partition& part, const ScanOptions& opts) {
  return verify_partition(part, opts).sum_corollary;
}

}  // namespace geonet
