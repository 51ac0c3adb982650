#include "geonet/catalog.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

namespace geonet {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 sph(double lat, double lon) {
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
          std::sin(lat)};
}

std::vector<std::pair<int, Vec3>> scaled_unit(std::vector<std::pair<int, Vec3>> vs) {
  for (auto& [id, p] : vs) p = normalized(p);
  return vs;
}

// Undirected edge list from a coordinate set: pairs whose chord length is
// minimal (within slack). Works for the vertex-transitive polyhedra here.
std::vector<std::pair<int, int>> nearest_edges(
    const std::vector<std::pair<int, Vec3>>& vs) {
  double best = -1.0;
  for (size_t i = 0; i < vs.size(); ++i) {
    for (size_t j = i + 1; j < vs.size(); ++j) {
      best = std::max(best, vs[i].second.dot(vs[j].second));
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 0; i < vs.size(); ++i) {
    for (size_t j = i + 1; j < vs.size(); ++j) {
      if (vs[i].second.dot(vs[j].second) > best - 1e-6) {
        edges.emplace_back(vs[i].first, vs[j].first);
      }
    }
  }
  return edges;
}

Network great_circle_net() {
  std::vector<std::pair<int, Vec3>> vs = {{1, {1, 0, 0}}, {2, {-1, 0, 0}}};
  std::vector<Vertex> verts;
  for (auto& [id, p] : vs) verts.push_back({id, p, false, {}});
  const Vec3 pole(0, 0, 1);
  std::vector<NetworkArc> arcs(2);
  arcs[0] = {1, 1, 2, GreatArc::make({1, 0, 0}, pole, kPi)};
  arcs[1] = {2, 2, 1, GreatArc::make({-1, 0, 0}, pole, kPi)};
  return Network::build(std::move(verts), std::move(arcs));
}

Network three_half_circles_net() {
  std::vector<Vertex> verts = {{1, {0, 0, 1}, false, {}}, {2, {0, 0, -1}, false, {}}};
  std::vector<NetworkArc> arcs;
  for (int k = 0; k < 3; ++k) {
    const double lon = 2.0 * kPi * k / 3.0;
    const Vec3 pole(-std::sin(lon), std::cos(lon), 0.0);
    arcs.push_back({k + 1, 1, 2, GreatArc::make({0, 0, 1}, pole, kPi)});
  }
  BuildOptions opts;
  opts.require_stationary = true;
  return Network::build(std::move(verts), std::move(arcs), opts);
}

Network tetrahedron_net() {
  // Vertex 1 is the junction where arcs 1, 2, 3 start; arcs 4, 5, 6 run
  // around the opposite triangle.
  const double r = 1.0 / std::sqrt(3.0);
  std::vector<std::pair<int, Vec3>> vs = {{1, {r, r, r}},
                                          {2, {r, -r, -r}},
                                          {3, {-r, r, -r}},
                                          {4, {-r, -r, r}}};
  std::vector<std::pair<int, int>> edges = {{1, 2}, {1, 3}, {1, 4},
                                            {4, 3}, {2, 4}, {3, 2}};
  BuildOptions opts;
  opts.require_stationary = true;
  return network_from_edges(vs, edges, opts);
}

std::vector<std::pair<int, Vec3>> cube_vertices() {
  std::vector<std::pair<int, Vec3>> vs;
  int id = 1;
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        vs.push_back({id++, Vec3(sx, sy, sz)});
      }
    }
  }
  return scaled_unit(vs);
}

std::vector<std::pair<int, Vec3>> dodecahedron_vertices() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::pair<int, Vec3>> vs;
  int id = 1;
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        vs.push_back({id++, Vec3(sx, sy, sz)});
      }
    }
  }
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      vs.push_back({id++, Vec3(0, s1 / phi, s2 * phi)});
      vs.push_back({id++, Vec3(s1 / phi, s2 * phi, 0)});
      vs.push_back({id++, Vec3(s1 * phi, 0, s2 / phi)});
    }
  }
  return scaled_unit(vs);
}

Network polyhedron_net(const std::vector<std::pair<int, Vec3>>& vs) {
  BuildOptions opts;
  opts.require_stationary = true;
  return network_from_edges(vs, nearest_edges(vs), opts);
}

// --- the three optimized nets ----------------------------------------------
//
// Combinatorics are fixed tables. Coordinates come from solving the balance
// equations inside each net's symmetric configuration space (latitudes and,
// for the 4-4 type, one longitude offset), which pins the global orientation
// so that the mirror circle of each net is exactly the equator.

struct SymmetricLayout {
  // Vertex positions for the given parameters.
  std::function<std::vector<std::pair<int, Vec3>>(const Eigen::VectorXd&)> place;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> probe_vertices;  // one representative per orbit
  Eigen::VectorXd initial;
};

// Tangential balance residuals at the probe vertices, stacked two components
// per vertex.
Eigen::VectorXd layout_residual(const SymmetricLayout& lay,
                                const Eigen::VectorXd& p) {
  std::map<int, Vec3> pos;
  for (const auto& [id, x] : lay.place(p)) pos[id] = normalized(x);
  std::map<int, std::vector<int>> adj;
  for (const auto& [a, b] : lay.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  Eigen::VectorXd F(2 * lay.probe_vertices.size());
  int row = 0;
  for (int vid : lay.probe_vertices) {
    const Vec3 x = pos.at(vid);
    Vec3 sum = Vec3::Zero();
    for (int other : adj.at(vid)) {
      const Vec3 y = pos.at(other);
      sum += normalized(y - y.dot(x) * x);
    }
    const auto [e1, e2] = tangent_basis(x);
    F(row++) = sum.dot(e1);
    F(row++) = sum.dot(e2);
  }
  return F;
}

// Small damped Gauss-Newton for the reduced balance system.
Eigen::VectorXd solve_layout(const SymmetricLayout& lay) {
  Eigen::VectorXd p = lay.initial;
  Eigen::VectorXd F = layout_residual(lay, p);
  double damping = 1e-10;
  for (int iter = 0; iter < 200 && F.lpNorm<Eigen::Infinity>() > 1e-13; ++iter) {
    const double h = 1e-7;
    Eigen::MatrixXd J(F.size(), p.size());
    for (int c = 0; c < p.size(); ++c) {
      Eigen::VectorXd pp = p;
      pp(c) += h;
      J.col(c) = (layout_residual(lay, pp) - F) / h;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::MatrixXd JTJ = J.transpose() * J;
      JTJ.diagonal().array() += damping;
      const Eigen::VectorXd step = JTJ.ldlt().solve(-J.transpose() * F);
      const Eigen::VectorXd pt = p + step;
      const Eigen::VectorXd Ft = layout_residual(lay, pt);
      if (Ft.squaredNorm() < F.squaredNorm()) {
        p = pt;
        F = Ft;
        damping = std::max(1e-14, damping * 0.25);
        accepted = true;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) break;
  }
  if (layout_residual(lay, p).lpNorm<Eigen::Infinity>() > 1e-11) {
    throw std::runtime_error("catalog: symmetric balance solve stalled");
  }
  return p;
}

Network solved_net(const SymmetricLayout& lay) {
  const Eigen::VectorXd p = solve_layout(lay);
  BuildOptions opts;
  opts.require_stationary = true;
  return network_from_edges(lay.place(p), lay.edges, opts);
}

// 4-4 type: ridge vertices r at latitude p0 (longitudes 0/180 on top, 90/270
// below), corner vertices u/d at latitude +-p1 and longitude 45 + p2 shifted
// by the antiprismatic symmetry.
SymmetricLayout type44_layout() {
  SymmetricLayout lay;
  lay.place = [](const Eigen::VectorXd& p) {
    const double lr = p(0), lu = p(1), lon = p(2);
    const double q = kPi / 4.0;
    std::vector<std::pair<int, Vec3>> vs;
    vs.push_back({1, sph(lr, 0)});
    vs.push_back({2, sph(lr, kPi)});
    vs.push_back({3, sph(lu, q + lon)});            // u1
    vs.push_back({4, sph(lu, 3 * q - lon)});        // u2
    vs.push_back({5, sph(lu, 5 * q + lon)});        // u3
    vs.push_back({6, sph(lu, 7 * q - lon)});        // u4
    vs.push_back({7, sph(-lr, kPi / 2)});
    vs.push_back({8, sph(-lr, 3 * kPi / 2)});
    vs.push_back({9, sph(-lu, q - lon)});           // d1
    vs.push_back({10, sph(-lu, 3 * q + lon)});      // d2
    vs.push_back({11, sph(-lu, 5 * q - lon)});      // d3
    vs.push_back({12, sph(-lu, 7 * q + lon)});      // d4
    return vs;
  };
  lay.edges = {
      {1, 2},
      {1, 3}, {1, 6}, {2, 4}, {2, 5}, {3, 4}, {5, 6},
      {7, 8},
      {7, 10}, {7, 9}, {8, 11}, {8, 12}, {10, 11}, {12, 9},
      {3, 9}, {4, 10}, {5, 11}, {6, 12},
  };
  lay.probe_vertices = {1, 3};
  lay.initial = Eigen::Vector3d(1.05, 0.42, 0.0);
  return lay;
}

// 6-3 type: poles, two latitude-p0 triangles at the same longitudes, and six
// equatorial vertices at longitude offsets +-p1.
SymmetricLayout type63_layout() {
  SymmetricLayout lay;
  lay.place = [](const Eigen::VectorXd& p) {
    const double la = p(0), w = p(1);
    const double step = 2.0 * kPi / 3.0;
    std::vector<std::pair<int, Vec3>> vs;
    vs.push_back({1, {0, 0, 1}});
    vs.push_back({2, {0, 0, -1}});
    for (int k = 0; k < 3; ++k) {
      vs.push_back({3 + k, sph(la, k * step)});
      vs.push_back({6 + k, sph(-la, k * step)});
      vs.push_back({9 + k, sph(0.0, k * step - w)});
      vs.push_back({12 + k, sph(0.0, k * step + w)});
    }
    return vs;
  };
  for (int k = 0; k < 3; ++k) {
    const int A = 3 + k, Ap = 6 + k, Em = 9 + k, Ep = 12 + k;
    lay.edges.push_back({1, A});
    lay.edges.push_back({2, Ap});
    lay.edges.push_back({A, Em});
    lay.edges.push_back({A, Ep});
    lay.edges.push_back({Ap, Em});
    lay.edges.push_back({Ap, Ep});
    lay.edges.push_back({Ep, 9 + (k + 1) % 3});
  }
  lay.probe_vertices = {3, 12};
  lay.initial = Eigen::Vector2d(0.62, 0.42);
  return lay;
}

// 8-2 type: two polar squares rotated by 45 degrees at latitude +-p0 and two
// mid rings at latitude +-p1 forming the antiprismatic pentagon band.
SymmetricLayout type82_layout() {
  SymmetricLayout lay;
  lay.place = [](const Eigen::VectorXd& p) {
    const double lsq = p(0), lmid = p(1);
    const double step = kPi / 2.0;
    std::vector<std::pair<int, Vec3>> vs;
    for (int k = 0; k < 4; ++k) {
      vs.push_back({1 + k, sph(lsq, k * step)});
      vs.push_back({5 + k, sph(lmid, k * step)});
      vs.push_back({9 + k, sph(-lmid, k * step + step / 2)});
      vs.push_back({13 + k, sph(-lsq, k * step + step / 2)});
    }
    return vs;
  };
  for (int k = 0; k < 4; ++k) {
    const int t = 1 + k, um = 5 + k, b = 13 + k;
    lay.edges.push_back({t, 1 + (k + 1) % 4});
    lay.edges.push_back({b, 13 + (k + 1) % 4});
    lay.edges.push_back({t, um});
    lay.edges.push_back({b, 9 + k});
    lay.edges.push_back({um, 9 + k});
    lay.edges.push_back({9 + k, 5 + (k + 1) % 4});
  }
  lay.probe_vertices = {1, 5};
  lay.initial = Eigen::Vector2d(1.0, 0.28);
  return lay;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"great-circle", 2, 2, 2, "explicit"},
      {"three-half-circles", 2, 3, 3, "explicit"},
      {"tetrahedron", 4, 6, 4, "explicit"},
      {"prism3", 6, 9, 5, "one-parameter"},
      {"cube", 8, 12, 6, "explicit"},
      {"prism5", 10, 15, 7, "one-parameter"},
      {"type44", 12, 18, 8, "optimized"},
      {"type63", 14, 21, 9, "optimized"},
      {"type82", 16, 24, 10, "optimized"},
      {"dodecahedron", 20, 30, 12, "explicit"},
  };
  return entries;
}

Network catalog_build(const std::string& name) {
  if (name == "great-circle") return great_circle_net();
  if (name == "three-half-circles") return three_half_circles_net();
  if (name == "tetrahedron") return tetrahedron_net();
  if (name == "cube") return polyhedron_net(cube_vertices());
  if (name == "dodecahedron") return polyhedron_net(dodecahedron_vertices());
  if (name == "prism3") return stationarize_latitude(3).second;
  if (name == "prism5") return stationarize_latitude(5).second;
  if (name == "type44") return solved_net(type44_layout());
  if (name == "type63") return solved_net(type63_layout());
  if (name == "type82") return solved_net(type82_layout());
  throw std::invalid_argument("catalog_build: unknown entry '" + name + "'");
}

Network network_from_edges(const std::vector<std::pair<int, Vec3>>& vertices,
                           const std::vector<std::pair<int, int>>& edges,
                           const BuildOptions& opts) {
  std::map<int, Vec3> pos;
  std::vector<Vertex> verts;
  for (const auto& [id, p] : vertices) {
    const Vec3 u = normalized(p);
    pos[id] = u;
    verts.push_back({id, u, false, {}});
  }
  std::vector<NetworkArc> arcs;
  int aid = 1;
  for (const auto& [a, b] : edges) {
    NetworkArc na;
    na.id = aid++;
    na.start_vertex = a;
    na.end_vertex = b;
    na.arc = GreatArc::between(pos.at(a), pos.at(b));
    arcs.push_back(na);
  }
  return Network::build(std::move(verts), std::move(arcs), opts);
}

namespace {

// Balance residuals of all interior vertices, two tangential components each,
// as a function of the stacked vertex positions.
struct BalanceSystem {
  const Network* net;
  std::vector<int> free_ids;  // interior vertex ids, storage order

  Eigen::VectorXd residual(const std::map<int, Vec3>& pos) const {
    Eigen::VectorXd F(2 * free_ids.size());
    int row = 0;
    for (int vid : free_ids) {
      const Vertex& v = net->vertex_by_id(vid);
      const Vec3 p = pos.at(vid);
      Vec3 sum = Vec3::Zero();
      for (const auto& e : v.ends) {
        const NetworkArc& na = net->arc_by_id(e.arc_id);
        const int other = e.end == Endpoint::Start ? na.end_vertex : na.start_vertex;
        const Vec3 q = pos.at(other);
        const Vec3 t = q - q.dot(p) * p;
        const double n = t.norm();
        if (n < 1e-9) {
          throw std::runtime_error("stationarize: arc collapse during iteration");
        }
        sum += t / n;
      }
      const auto [e1, e2] = tangent_basis(p);
      F(row++) = sum.dot(e1);
      F(row++) = sum.dot(e2);
    }
    return F;
  }
};

}  // namespace

StationarizeResult stationarize(const Network& net, int max_iters, double tol) {
  BalanceSystem sys;
  sys.net = &net;
  std::map<int, Vec3> pos;
  for (const auto& v : net.vertices()) {
    pos[v.id] = v.pos;
    if (!v.boundary) sys.free_ids.push_back(v.id);
  }
  const int nv = static_cast<int>(sys.free_ids.size());
  if (nv == 0) throw std::invalid_argument("stationarize: no interior vertices");

  auto rebuild = [&](const std::map<int, Vec3>& p) {
    std::vector<Vertex> verts = net.vertices();
    for (auto& v : verts) {
      v.ends.clear();
      v.pos = p.at(v.id);
    }
    std::vector<NetworkArc> arcs = net.arcs();
    for (auto& na : arcs) {
      const Vec3& a = p.at(na.start_vertex);
      const Vec3& b = p.at(na.end_vertex);
      if (a.cross(b).norm() < 1e-8) {
        throw std::runtime_error("stationarize: degenerate arc (collapsed or antipodal)");
      }
      na.arc = GreatArc::between(a, b, na.arc.pole);
      if (na.arc.length < 1e-6) {
        throw std::runtime_error("stationarize: arc collapse");
      }
    }
    BuildOptions opts;
    opts.check_embedded = false;
    return Network::build(std::move(verts), std::move(arcs), opts);
  };

  auto total_length = [&](const std::map<int, Vec3>& p) {
    double sum = 0.0;
    for (const auto& na : net.arcs()) {
      const double c = p.at(na.start_vertex).dot(p.at(na.end_vertex));
      sum += std::acos(std::clamp(c, -1.0, 1.0));
    }
    return sum;
  };

  StationarizeResult out{net, 0, 0.0, {}, {}};
  Eigen::VectorXd F = sys.residual(pos);
  double merit = F.squaredNorm();
  out.merit_history.push_back(merit);
  out.length_history.push_back(total_length(pos));

  double lm_damping = 1e-8;
  int iter = 0;
  for (; iter < max_iters && F.lpNorm<Eigen::Infinity>() > tol; ++iter) {
    // Finite-difference Jacobian in the per-vertex tangent frames.
    const double h = 1e-7;
    Eigen::MatrixXd J(2 * nv, 2 * nv);
    for (int c = 0; c < nv; ++c) {
      const int vid = sys.free_ids[c];
      const Vec3 p0 = pos.at(vid);
      const auto [e1, e2] = tangent_basis(p0);
      for (int d = 0; d < 2; ++d) {
        const Vec3 dir = d == 0 ? e1 : e2;
        pos[vid] = normalized(p0 + h * dir);
        const Eigen::VectorXd Fp = sys.residual(pos);
        pos[vid] = p0;
        J.col(2 * c + d) = (Fp - F) / h;
      }
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::MatrixXd JTJ = J.transpose() * J;
      JTJ.diagonal().array() += lm_damping;
      const Eigen::VectorXd step = JTJ.ldlt().solve(-J.transpose() * F);
      std::map<int, Vec3> trial = pos;
      for (int c = 0; c < nv; ++c) {
        const int vid = sys.free_ids[c];
        const auto [e1, e2] = tangent_basis(pos.at(vid));
        trial[vid] =
            normalized(pos.at(vid) + step(2 * c) * e1 + step(2 * c + 1) * e2);
      }
      Eigen::VectorXd Ft;
      try {
        Ft = sys.residual(trial);
      } catch (const std::runtime_error&) {
        lm_damping *= 10.0;
        continue;
      }
      const double mt = Ft.squaredNorm();
      if (mt < merit) {
        pos = std::move(trial);
        F = std::move(Ft);
        merit = mt;
        lm_damping = std::max(1e-12, lm_damping * 0.25);
        accepted = true;
      } else {
        lm_damping *= 10.0;
      }
    }
    if (!accepted) break;
    out.merit_history.push_back(merit);
    out.length_history.push_back(total_length(pos));
  }

  out.iterations = iter;
  out.residual = F.lpNorm<Eigen::Infinity>();
  if (out.residual > tol) {
    throw std::runtime_error("stationarize: stalled at balance residual " +
                             std::to_string(out.residual));
  }
  out.net = rebuild(pos);
  return out;
}

std::pair<double, Network> stationarize_latitude(int n) {
  if (n != 3 && n != 5) {
    throw std::invalid_argument("stationarize_latitude: n must be 3 or 5");
  }
  const double alpha = 2.0 * kPi / n;

  auto g = [&](double lat) {
    const Vec3 v = sph(lat, 0.0);
    const Vec3 wp = sph(lat, alpha);
    const Vec3 wm = sph(lat, -alpha);
    const Vec3 u = sph(-lat, 0.0);
    auto tangent_toward = [&](const Vec3& y) {
      return normalized(y - y.dot(v) * v);
    };
    const Vec3 m(-std::sin(lat), 0.0, std::cos(lat));
    return (tangent_toward(wp) + tangent_toward(wm) + tangent_toward(u)).dot(m);
  };

  double lo = 1e-6, hi = kPi / 2.0 - 1e-6;
  if (g(lo) * g(hi) > 0.0) {
    throw std::runtime_error("stationarize_latitude: root not bracketed");
  }
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double lat = 0.5 * (lo + hi);

  std::vector<std::pair<int, Vec3>> vs;
  for (int k = 0; k < n; ++k) {
    vs.push_back({k + 1, sph(lat, k * alpha)});
    vs.push_back({n + k + 1, sph(-lat, k * alpha)});
  }
  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < n; ++k) {
    edges.push_back({k + 1, (k + 1) % n + 1});          // top ring
    edges.push_back({n + k + 1, n + (k + 1) % n + 1});  // bottom ring
    edges.push_back({k + 1, n + k + 1});                // vertical
  }
  BuildOptions opts;
  opts.require_stationary = true;
  opts.stationary_tol = 1e-10;
  return {lat, network_from_edges(vs, edges, opts)};
}

}  // namespace geonet
