#pragma once

// Shared helpers for the test suites: canonical partitions of the catalog
// nets and a few small example networks.

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "geonet/basis.hpp"
#include "geonet/catalog.hpp"
#include "geonet/dtn.hpp"

namespace geonet::testsupport {

inline constexpr double kPi = std::numbers::pi;

inline Network single_arc(double l, double d_unused = 1.0) {
  (void)d_unused;
  std::vector<Vertex> verts = {
      {1, {1, 0, 0}, true, {}},
      {2, {std::cos(l), std::sin(l), 0}, true, {}}};
  std::vector<NetworkArc> arcs(1);
  arcs[0] = {1, 1, 2, GreatArc::make({1, 0, 0}, {0, 0, 1}, l)};
  return Network::build(std::move(verts), std::move(arcs));
}

inline Network circle_two_arcs() {
  std::vector<Vertex> verts = {{1, {1, 0, 0}, false, {}},
                               {2, {-1, 0, 0}, false, {}}};
  std::vector<NetworkArc> arcs(2);
  arcs[0] = {1, 1, 2, GreatArc::make({1, 0, 0}, {0, 0, 1}, kPi)};
  arcs[1] = {2, 2, 1, GreatArc::make({-1, 0, 0}, {0, 0, 1}, kPi)};
  return Network::build(std::move(verts), std::move(arcs));
}

inline int max_vertex_id(const Network& net) {
  int m = 0;
  for (const auto& v : net.vertices()) m = std::max(m, v.id);
  return m;
}

// Splits every listed arc at parameter t, returning the refined network and
// the ids of the inserted vertices.
inline std::pair<Network, std::vector<int>> refine_arcs(Network net,
                                                        std::vector<int> arc_ids,
                                                        double t = 0.5) {
  std::vector<int> inserted;
  for (int aid : arc_ids) {
    net = refine(net, aid, t);
    inserted.push_back(max_vertex_id(net));
  }
  return {std::move(net), std::move(inserted)};
}

// Arc ids whose endpoints lie strictly on opposite sides of the plane z = 0.
inline std::vector<int> equator_crossing_arcs(const Network& net) {
  std::vector<int> ids;
  for (const auto& na : net.arcs()) {
    const double za = net.vertex_by_id(na.start_vertex).pos.z();
    const double zb = net.vertex_by_id(na.end_vertex).pos.z();
    if (za * zb < -1e-12) ids.push_back(na.id);
  }
  return ids;
}

// Split parameter where the arc crosses z = 0.
inline double equator_crossing_parameter(const GreatArc& arc) {
  const Vec3 q = arc.pole.cross(arc.start);
  // z(s) = z_start cos s + z_q sin s vanishes at two antipodal angles.
  double s = std::atan2(arc.start.z(), -q.z());
  if (s < 0) s += 2 * kPi;
  for (double cand : {s, s + kPi, s - kPi}) {
    if (cand > 1e-12 && cand < arc.length - 1e-12) return cand / arc.length;
  }
  throw std::runtime_error("equator crossing outside the arc");
}

// Half partition of a mirror-symmetric net: refine every equator-crossing
// arc at z = 0 and cut at the inserted double points.
inline Partition half_partition(const Network& net) {
  Network cur = net;
  std::vector<int> cuts;
  for (int aid : equator_crossing_arcs(net)) {
    const double t = equator_crossing_parameter(cur.arc_by_id(aid).arc);
    cur = refine(cur, aid, t);
    cuts.push_back(max_vertex_id(cur));
  }
  return Partition::by_cuts(cur, cuts);
}

// Vertices nearest to the four alternating corner directions.
inline std::vector<int> tetrad_vertices(const Network& net) {
  const double r = 1.0 / std::sqrt(3.0);
  std::vector<int> out;
  for (const Vec3& dir : {Vec3(r, r, r), Vec3(r, -r, -r), Vec3(-r, r, -r),
                           Vec3(-r, -r, r)}) {
    int best = -1;
    double bestdot = -2.0;
    for (const auto& v : net.vertices()) {
      const double d = v.pos.dot(dir);
      if (d > bestdot) {
        bestdot = d;
        best = v.id;
      }
    }
    out.push_back(best);
  }
  return out;
}

// Four isometric pieces of the tetrahedron: cut every edge at its midpoint.
inline Partition tetrahedron_partition(const Network& tetra) {
  std::vector<int> ids;
  for (const auto& na : tetra.arcs()) ids.push_back(na.id);
  auto [refined, cuts] = refine_arcs(tetra, ids, 0.5);
  return Partition::by_cuts(refined, cuts);
}

// Four claw pieces of the cube: cut at one bipartition class of vertices.
inline Partition cube_partition(const Network& cube) {
  return Partition::by_cuts(cube, tetrad_vertices(cube));
}

// Four nine-arc pieces of the dodecahedron: cut at a tetrad of its corner
// vertices and at the midpoints of the six edges lying across the coordinate
// axes.
inline Partition dodecahedron_partition(const Network& dod) {
  Network cur = dod;
  std::vector<int> cuts = tetrad_vertices(dod);
  std::vector<int> axis_arcs;
  for (const auto& na : dod.arcs()) {
    const Vec3 mid =
        (dod.vertex_by_id(na.start_vertex).pos + dod.vertex_by_id(na.end_vertex).pos)
            .normalized();
    int axis_hits = 0;
    for (int c = 0; c < 3; ++c) {
      if (std::abs(std::abs(mid(c)) - 1.0) < 1e-9) ++axis_hits;
    }
    if (axis_hits == 1) axis_arcs.push_back(na.id);
  }
  if (axis_arcs.size() != 6) {
    throw std::runtime_error("dodecahedron axis edges not found");
  }
  for (int aid : axis_arcs) {
    cur = refine(cur, aid, 0.5);
    cuts.push_back(max_vertex_id(cur));
  }
  return Partition::by_cuts(cur, cuts);
}

// Three isometric pieces of the 6-3 net: cut at the two polar vertices and
// the midpoints of the three equatorial arcs.
inline Partition type63_partition(const Network& net) {
  Network cur = net;
  std::vector<int> cuts;
  for (const auto& v : net.vertices()) {
    if (std::abs(std::abs(v.pos.z()) - 1.0) < 1e-6) cuts.push_back(v.id);
  }
  if (cuts.size() != 2) throw std::runtime_error("6-3 poles not found");
  std::vector<int> equator_arcs;
  for (const auto& na : net.arcs()) {
    const double za = net.vertex_by_id(na.start_vertex).pos.z();
    const double zb = net.vertex_by_id(na.end_vertex).pos.z();
    if (std::abs(za) < 1e-6 && std::abs(zb) < 1e-6) equator_arcs.push_back(na.id);
  }
  if (equator_arcs.size() != 3) {
    throw std::runtime_error("6-3 equator arcs not found");
  }
  for (int aid : equator_arcs) {
    cur = refine(cur, aid, 0.5);
    cuts.push_back(max_vertex_id(cur));
  }
  return Partition::by_cuts(cur, cuts);
}

// Random value-admissible function: one random bulk mode per arc plus a
// correction mode pinning the endpoint values to admissible vertex targets
// (zero on the boundary unless free_boundary).
inline NetworkFunction random_admissible(const Network& net,
                                         const VertexSpaces& spaces,
                                         std::mt19937_64& rng,
                                         bool free_boundary = false) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::map<std::pair<int, int>, double> target;  // (vertex, ordinal) -> value
  for (const auto& v : net.vertices()) {
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(v.ends.size());
    if (!v.boundary) {
      const auto& entry = spaces.at(v.id);
      Eigen::VectorXd coef(entry.B1.cols());
      for (int i = 0; i < coef.size(); ++i) coef(i) = unif(rng);
      vals = entry.B1 * coef;
    } else if (free_boundary) {
      for (int i = 0; i < vals.size(); ++i) vals(i) = unif(rng);
    }
    for (size_t i = 0; i < v.ends.size(); ++i) {
      target[{v.id, static_cast<int>(i)}] = vals(i);
    }
  }
  auto end_target = [&](int arc_id, Endpoint e) {
    const Vertex& v = net.vertex_at(arc_id, e);
    for (size_t i = 0; i < v.ends.size(); ++i) {
      if (v.ends[i].arc_id == arc_id && v.ends[i].end == e) {
        return target.at({v.id, static_cast<int>(i)});
      }
    }
    throw std::logic_error("end not found");
  };

  const double mu_c = 0.35711;
  NetworkFunction f = NetworkFunction::zero(net);
  for (int i = 0; i < net.num_arcs(); ++i) {
    const int aid = net.arcs()[i].id;
    const double len = net.arcs()[i].arc.length;
    ArcMode bulk{1.5 * unif(rng), unif(rng), unif(rng)};
    f.arcs[i].modes = {bulk};
    const double t0 = end_target(aid, Endpoint::Start);
    const double t1 = end_target(aid, Endpoint::End);
    const double Ac = t0 - f.arcs[i].value(0.0);
    const double c = basis_C(mu_c, len), s = basis_S(mu_c, len);
    const double Bc = (t1 - f.arcs[i].value(len) - Ac * c) / s;
    f.arcs[i].modes.push_back({mu_c, Ac, Bc});
  }
  return f;
}

}  // namespace geonet::testsupport
