#include "geonet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "geonet/basis.hpp"

namespace geonet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle of x along the arc's circle measured from start, in [0, 2*pi).
double circle_angle(const GreatArc& arc, const Vec3& x) {
  const Vec3 q = arc.pole.cross(arc.start);
  double a = std::atan2(q.dot(x), arc.start.dot(x));
  if (a < 0.0) a += kTwoPi;
  return a;
}

bool on_arc_interior(const GreatArc& arc, const Vec3& x, double tol) {
  if (std::abs(arc.pole.dot(x)) > tol) return false;
  const double a = circle_angle(arc, x);
  return a > tol && a < arc.length - tol;
}

// Arcs on a common great circle: check for interior overlap.
bool coplanar_overlap(const GreatArc& a, const GreatArc& b, double tol) {
  // Angular interval of b measured in a's parameterization.
  const double sign = a.pole.dot(b.pole) > 0.0 ? 1.0 : -1.0;
  double b0 = circle_angle(a, b.start);
  double b1 = circle_angle(a, b.end);
  if (sign < 0.0) std::swap(b0, b1);
  // Interval [b0, b0 + blen] mod 2*pi against [0, a.length].
  double blen = b1 - b0;
  if (blen < 0.0) blen += kTwoPi;
  for (double shift : {0.0, -kTwoPi}) {
    const double lo = b0 + shift;
    const double hi = lo + blen;
    if (hi > tol && lo < a.length - tol) {
      // Overlap length beyond a shared endpoint?
      const double olo = std::max(lo, 0.0);
      const double ohi = std::min(hi, a.length);
      if (ohi - olo > tol) return true;
    }
  }
  return false;
}

}  // namespace

Network Network::build(std::vector<Vertex> vertices, std::vector<NetworkArc> arcs,
                       const BuildOptions& opts) {
  Network net;
  net.vertices_ = std::move(vertices);
  net.arcs_ = std::move(arcs);

  std::map<int, int> vidx;
  for (size_t i = 0; i < net.vertices_.size(); ++i) {
    auto& v = net.vertices_[i];
    v.ends.clear();
    v.pos = normalized(v.pos);
    if (!vidx.emplace(v.id, static_cast<int>(i)).second) {
      throw std::invalid_argument("Network: duplicate vertex id");
    }
  }

  std::set<int> aids;
  for (auto& na : net.arcs_) {
    if (!aids.insert(na.id).second) {
      throw std::invalid_argument("Network: duplicate arc id");
    }
    if (na.start_vertex == na.end_vertex) {
      throw std::invalid_argument("Network: self-loop arc; refine into >= 2 arcs");
    }
    auto is = vidx.find(na.start_vertex);
    auto ie = vidx.find(na.end_vertex);
    if (is == vidx.end() || ie == vidx.end()) {
      throw std::invalid_argument("Network: arc references unknown vertex");
    }
    Vertex& vs = net.vertices_[is->second];
    Vertex& ve = net.vertices_[ie->second];
    if ((na.arc.start - vs.pos).norm() > opts.vertex_match_tol ||
        (na.arc.end - ve.pos).norm() > opts.vertex_match_tol) {
      throw std::invalid_argument("Network: arc endpoint does not meet its vertex");
    }
    vs.ends.push_back({na.id, Endpoint::Start});
    ve.ends.push_back({na.id, Endpoint::End});
  }

  int total_ends = 0;
  for (auto& v : net.vertices_) {
    if (v.ends.empty()) {
      throw std::invalid_argument("Network: isolated vertex");
    }
    std::sort(v.ends.begin(), v.ends.end(), [](const ArcEndRef& a, const ArcEndRef& b) {
      if (a.arc_id != b.arc_id) return a.arc_id < b.arc_id;
      return a.end == Endpoint::Start && b.end == Endpoint::End;
    });
    total_ends += static_cast<int>(v.ends.size());
    if (!v.boundary) ++net.interior_count_;
  }
  if (total_ends != 2 * net.num_arcs()) {
    throw std::logic_error("Network: end bookkeeping failed");
  }

  if (opts.check_embedded) {
    const auto& as = net.arcs_;
    for (size_t i = 0; i < as.size(); ++i) {
      for (size_t j = i + 1; j < as.size(); ++j) {
        const GreatArc& a = as[i].arc;
        const GreatArc& b = as[j].arc;
        const Vec3 c = a.pole.cross(b.pole);
        if (c.norm() < opts.embed_tol) {
          if (coplanar_overlap(a, b, opts.embed_tol)) {
            throw std::invalid_argument("Network: overlapping coplanar arcs");
          }
          continue;
        }
        const Vec3 q = c.normalized();
        for (const Vec3& x : {q, Vec3(-q)}) {
          if (on_arc_interior(a, x, opts.embed_tol) &&
              on_arc_interior(b, x, opts.embed_tol)) {
            throw std::invalid_argument("Network: arcs cross away from vertices");
          }
        }
      }
    }
  }

  if (opts.require_stationary) {
    const double r = net.max_balance_residual();
    if (r > opts.stationary_tol) {
      throw std::invalid_argument("Network: balance residual " + std::to_string(r) +
                                  " exceeds stationary tolerance");
    }
  }
  return net;
}

int Network::arc_index(int arc_id) const {
  for (size_t i = 0; i < arcs_.size(); ++i) {
    if (arcs_[i].id == arc_id) return static_cast<int>(i);
  }
  throw std::out_of_range("Network: unknown arc id " + std::to_string(arc_id));
}

int Network::vertex_index(int vertex_id) const {
  for (size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == vertex_id) return static_cast<int>(i);
  }
  throw std::out_of_range("Network: unknown vertex id " + std::to_string(vertex_id));
}

const Vertex& Network::vertex_at(int arc_id, Endpoint e) const {
  const NetworkArc& na = arc_by_id(arc_id);
  return vertex_by_id(e == Endpoint::Start ? na.start_vertex : na.end_vertex);
}

double Network::total_length() const {
  double sum = 0.0;
  for (const auto& na : arcs_) sum += na.arc.length;
  return sum;
}

double Network::max_balance_residual() const {
  double worst = 0.0;
  for (const auto& v : vertices_) {
    if (v.boundary) continue;
    std::vector<Vec3> taus;
    taus.reserve(v.ends.size());
    for (const auto& e : v.ends) {
      taus.push_back(arc_by_id(e.arc_id).arc.outward_tangent(e.end));
    }
    worst = std::max(worst, balance_residual(taus));
  }
  return worst;
}

bool Network::connected() const {
  if (vertices_.empty()) return true;
  std::map<int, std::vector<int>> adj;  // vertex id -> neighbor vertex ids
  for (const auto& na : arcs_) {
    adj[na.start_vertex].push_back(na.end_vertex);
    adj[na.end_vertex].push_back(na.start_vertex);
  }
  std::set<int> seen;
  std::vector<int> stack{vertices_.front().id};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (!seen.insert(v).second) continue;
    for (int w : adj[v]) stack.push_back(w);
  }
  return seen.size() == vertices_.size();
}

const VertexSpaces::Entry& VertexSpaces::at(int vertex_id) const {
  for (const auto& e : entries) {
    if (e.vertex_id == vertex_id) return e;
  }
  throw std::out_of_range("VertexSpaces: no entry for vertex " +
                          std::to_string(vertex_id));
}

VertexSpaces vertex_spaces(const Network& net) {
  VertexSpaces out;
  for (const auto& v : net.vertices()) {
    if (v.boundary) continue;
    const int j = static_cast<int>(v.ends.size());
    const auto [e1, e2] = tangent_basis(v.pos);
    Eigen::MatrixXd M(j, 2);
    for (int r = 0; r < j; ++r) {
      // nu at P is the pole of the incident arc, independent of the end tag.
      const Vec3 nu = net.arc_by_id(v.ends[r].arc_id).arc.pole;
      M(r, 0) = nu.dot(e1);
      M(r, 1) = nu.dot(e2);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int k = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-9 * smax) ++k;
    }
    if (k == 0) {
      throw std::runtime_error("vertex_spaces: degenerate vertex " +
                               std::to_string(v.id));
    }
    VertexSpaces::Entry entry;
    entry.vertex_id = v.id;
    entry.B1 = svd.matrixU().leftCols(k);
    entry.B2 = svd.matrixU().rightCols(j - k);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

EulerCounts euler_counts(const Network& net) {
  if (!net.closed()) {
    throw std::invalid_argument("euler_counts: network has boundary vertices");
  }
  if (!net.connected()) {
    throw std::invalid_argument("euler_counts: network is disconnected");
  }
  EulerCounts c;
  c.V = net.num_interior();
  c.E = net.num_arcs();
  c.F = 2 - c.V + c.E;
  return c;
}

Network refine(const Network& net, int arc_id, double t) {
  if (!(t > 0.0) || !(t < 1.0)) {
    throw std::invalid_argument("refine: t must lie in (0, 1)");
  }
  const NetworkArc& parent = net.arc_by_id(arc_id);
  const double l1 = t * parent.arc.length;
  const double l2 = parent.arc.length - l1;
  const Vec3 mid = parent.arc.point(l1);

  int max_vid = 0, max_aid = 0;
  for (const auto& v : net.vertices()) max_vid = std::max(max_vid, v.id);
  for (const auto& a : net.arcs()) max_aid = std::max(max_aid, a.id);

  std::vector<Vertex> verts = net.vertices();
  for (auto& v : verts) v.ends.clear();
  Vertex split;
  split.id = max_vid + 1;
  split.pos = mid;
  split.boundary = false;
  verts.push_back(split);

  std::vector<NetworkArc> arcs;
  arcs.reserve(net.arcs().size() + 1);
  for (const auto& na : net.arcs()) {
    if (na.id == arc_id) continue;
    arcs.push_back(na);
  }
  NetworkArc a1, a2;
  a1.id = max_aid + 1;
  a1.start_vertex = parent.start_vertex;
  a1.end_vertex = split.id;
  a1.arc = GreatArc::make(parent.arc.start, parent.arc.pole, l1);
  a2.id = max_aid + 2;
  a2.start_vertex = split.id;
  a2.end_vertex = parent.end_vertex;
  a2.arc = GreatArc::make(mid, parent.arc.pole, l2);
  arcs.push_back(a1);
  arcs.push_back(a2);

  BuildOptions opts;
  opts.check_embedded = false;  // refinement cannot introduce crossings
  return Network::build(std::move(verts), std::move(arcs), opts);
}

Network flip_orientation(const Network& net, int arc_id) {
  std::vector<Vertex> verts = net.vertices();
  for (auto& v : verts) v.ends.clear();
  std::vector<NetworkArc> arcs = net.arcs();
  for (auto& na : arcs) {
    if (na.id != arc_id) continue;
    GreatArc flipped = GreatArc::make(na.arc.end, -na.arc.pole, na.arc.length);
    na.arc = flipped;
    std::swap(na.start_vertex, na.end_vertex);
  }
  BuildOptions opts;
  opts.check_embedded = false;
  return Network::build(std::move(verts), std::move(arcs), opts);
}

// --- functions on networks ---------------------------------------------------

double ArcFunction::value(double s) const {
  double v = 0.0;
  for (const auto& m : modes) v += m.A * basis_C(m.mu, s) + m.B * basis_S(m.mu, s);
  return v;
}

double ArcFunction::deriv(double s) const {
  double v = 0.0;
  for (const auto& m : modes) {
    v += -m.mu * m.A * basis_S(m.mu, s) + m.B * basis_C(m.mu, s);
  }
  return v;
}

void ArcFunction::compress(double tol) {
  std::vector<ArcMode> merged;
  for (const auto& m : modes) {
    bool found = false;
    for (auto& out : merged) {
      if (out.mu == m.mu) {
        out.A += m.A;
        out.B += m.B;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(m);
  }
  modes.clear();
  for (const auto& m : merged) {
    if (std::abs(m.A) > tol || std::abs(m.B) > tol) modes.push_back(m);
  }
}

NetworkFunction NetworkFunction::zero(const Network& net) {
  NetworkFunction f;
  f.arcs.resize(net.num_arcs());
  return f;
}

NetworkFunction NetworkFunction::single_mode(const Network& net,
                                             const std::vector<ArcMode>& per_arc) {
  if (static_cast<int>(per_arc.size()) != net.num_arcs()) {
    throw std::invalid_argument("single_mode: per-arc mode count mismatch");
  }
  NetworkFunction f;
  f.arcs.resize(per_arc.size());
  for (size_t i = 0; i < per_arc.size(); ++i) f.arcs[i].modes = {per_arc[i]};
  return f;
}

double end_value(const Network& net, const NetworkFunction& f, int arc_id,
                 Endpoint e) {
  const int idx = net.arc_index(arc_id);
  const double s = e == Endpoint::Start ? 0.0 : net.arcs()[idx].arc.length;
  return f.arcs[idx].value(s);
}

double end_outward_derivative(const Network& net, const NetworkFunction& f,
                              int arc_id, Endpoint e) {
  const int idx = net.arc_index(arc_id);
  if (e == Endpoint::Start) return -f.arcs[idx].deriv(0.0);
  return f.arcs[idx].deriv(net.arcs()[idx].arc.length);
}

Eigen::VectorXd vertex_values(const Network& net, const NetworkFunction& f,
                              int vertex_id) {
  const Vertex& v = net.vertex_by_id(vertex_id);
  Eigen::VectorXd out(v.ends.size());
  for (size_t i = 0; i < v.ends.size(); ++i) {
    out(i) = end_value(net, f, v.ends[i].arc_id, v.ends[i].end);
  }
  return out;
}

Eigen::VectorXd vertex_outward_derivatives(const Network& net,
                                           const NetworkFunction& f,
                                           int vertex_id) {
  const Vertex& v = net.vertex_by_id(vertex_id);
  Eigen::VectorXd out(v.ends.size());
  for (size_t i = 0; i < v.ends.size(); ++i) {
    out(i) = end_outward_derivative(net, f, v.ends[i].arc_id, v.ends[i].end);
  }
  return out;
}

double admissibility_residual(const Network& net, const VertexSpaces& spaces,
                              const NetworkFunction& f) {
  double worst = 0.0;
  for (const auto& v : net.vertices()) {
    const Eigen::VectorXd vals = vertex_values(net, f, v.id);
    if (v.boundary) {
      worst = std::max(worst, vals.cwiseAbs().maxCoeff());
    } else {
      const auto& entry = spaces.at(v.id);
      const Eigen::VectorXd res = vals - entry.B1 * (entry.B1.transpose() * vals);
      worst = std::max(worst, res.norm());
    }
  }
  return worst;
}

namespace {

// int_0^len of (C/S at mu1) * (C/S at mu2). Closed form when mu1 == mu2,
// Simpson otherwise; panel count grows with the oscillation.
struct ModePairIntegrals {
  double cc, cs, sc, ss;
};

int panels_for(double mu1, double mu2, double len) {
  const double w = std::sqrt(std::max(std::abs(mu1), std::abs(mu2)));
  const int base = 256;
  const int extra = static_cast<int>(32.0 * w * len);
  return std::max(64, base + extra);
}

ModePairIntegrals mode_pair_integrals(double mu1, double mu2, double len) {
  ModePairIntegrals r;
  if (mu1 == mu2) {
    r.cc = int_CC(mu1, len);
    r.cs = int_CS(mu1, len);
    r.sc = r.cs;
    r.ss = int_SS(mu1, len);
    return r;
  }
  const int n = panels_for(mu1, mu2, len);
  r.cc = simpson([&](double s) { return basis_C(mu1, s) * basis_C(mu2, s); }, 0,
                 len, n);
  r.cs = simpson([&](double s) { return basis_C(mu1, s) * basis_S(mu2, s); }, 0,
                 len, n);
  r.sc = simpson([&](double s) { return basis_S(mu1, s) * basis_C(mu2, s); }, 0,
                 len, n);
  r.ss = simpson([&](double s) { return basis_S(mu1, s) * basis_S(mu2, s); }, 0,
                 len, n);
  return r;
}

double arc_l2(const ArcFunction& f, const ArcFunction& g, double len) {
  double sum = 0.0;
  for (const auto& a : f.modes) {
    for (const auto& b : g.modes) {
      const auto I = mode_pair_integrals(a.mu, b.mu, len);
      sum += a.A * b.A * I.cc + a.A * b.B * I.cs + a.B * b.A * I.sc +
             a.B * b.B * I.ss;
    }
  }
  return sum;
}

// int f' g' with f' = -mu A S + B C per mode.
double arc_grad(const ArcFunction& f, const ArcFunction& g, double len) {
  double sum = 0.0;
  for (const auto& a : f.modes) {
    for (const auto& b : g.modes) {
      const auto I = mode_pair_integrals(a.mu, b.mu, len);
      sum += (a.mu * b.mu * a.A * b.A) * I.ss - (a.mu * a.A * b.B) * I.sc -
             (b.mu * a.B * b.A) * I.cs + a.B * b.B * I.cc;
    }
  }
  return sum;
}

}  // namespace

double l2_inner_product(const Network& net, const NetworkFunction& f,
                        const NetworkFunction& g) {
  double sum = 0.0;
  for (int i = 0; i < net.num_arcs(); ++i) {
    sum += arc_l2(f.arcs[i], g.arcs[i], net.arcs()[i].arc.length);
  }
  return sum;
}

double l2_norm(const Network& net, const NetworkFunction& f) {
  return std::sqrt(std::max(0.0, l2_inner_product(net, f, f)));
}

double bilinear_form(const Network& net, const NetworkFunction& f,
                     const NetworkFunction& g, const Eigen::VectorXd& d_per_arc) {
  if (d_per_arc.size() != net.num_arcs()) {
    throw std::invalid_argument("bilinear_form: potential size mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < net.num_arcs(); ++i) {
    const double len = net.arcs()[i].arc.length;
    sum += arc_grad(f.arcs[i], g.arcs[i], len) -
           d_per_arc(i) * arc_l2(f.arcs[i], g.arcs[i], len);
  }
  return sum;
}

double index_form(const Network& net, const VertexSpaces& spaces,
                  const NetworkFunction& f, const NetworkFunction& g,
                  const Eigen::VectorXd& d_per_arc) {
  const double scale_f = 1.0 + l2_norm(net, f);
  const double scale_g = 1.0 + l2_norm(net, g);
  if (admissibility_residual(net, spaces, f) > 1e-7 * scale_f ||
      admissibility_residual(net, spaces, g) > 1e-7 * scale_g) {
    throw std::invalid_argument("index_form: function not admissible");
  }
  return bilinear_form(net, f, g, d_per_arc);
}

TraceSpace TraceSpace::over(const Network& net, const std::vector<int>& vertex_ids) {
  TraceSpace ts;
  std::vector<int> sorted = vertex_ids;
  std::sort(sorted.begin(), sorted.end());
  for (int vid : sorted) {
    const Vertex& v = net.vertex_by_id(vid);
    for (size_t i = 0; i < v.ends.size(); ++i) {
      ts.slots.push_back({vid, static_cast<int>(i)});
    }
  }
  return ts;
}

int TraceSpace::find(int vertex_id, int end_ordinal) const {
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].vertex_id == vertex_id && slots[i].end_ordinal == end_ordinal) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

Eigen::VectorXd trace_values(const Network& net, const NetworkFunction& f,
                             const TraceSpace& ts) {
  Eigen::VectorXd out(ts.dim());
  for (int i = 0; i < ts.dim(); ++i) {
    const Vertex& v = net.vertex_by_id(ts.slots[i].vertex_id);
    const auto& e = v.ends[ts.slots[i].end_ordinal];
    out(i) = end_value(net, f, e.arc_id, e.end);
  }
  return out;
}

Eigen::VectorXd trace_outward_derivatives(const Network& net,
                                          const NetworkFunction& f,
                                          const TraceSpace& ts) {
  Eigen::VectorXd out(ts.dim());
  for (int i = 0; i < ts.dim(); ++i) {
    const Vertex& v = net.vertex_by_id(ts.slots[i].vertex_id);
    const auto& e = v.ends[ts.slots[i].end_ordinal];
    out(i) = end_outward_derivative(net, f, e.arc_id, e.end);
  }
  return out;
}

}  // namespace geonet
