#pragma once

#include <string>
#include <vector>

#include "geonet/geometry.hpp"

namespace geonet {

struct ArcEndRef {
  int arc_id = 0;
  Endpoint end = Endpoint::Start;
};

struct Vertex {
  int id = 0;
  Vec3 pos = Vec3::Zero();
  bool boundary = false;
  std::vector<ArcEndRef> ends;  // filled by Network::build, sorted by arc id
};

struct NetworkArc {
  int id = 0;
  int start_vertex = 0;
  int end_vertex = 0;
  GreatArc arc;
};

struct BuildOptions {
  bool check_embedded = true;
  bool require_stationary = false;
  double vertex_match_tol = 1e-8;
  double stationary_tol = 1e-8;
  double embed_tol = 1e-9;
};

// Combinatorial + geometric network of great arcs. Immutable after build().
class Network {
 public:
  static Network build(std::vector<Vertex> vertices, std::vector<NetworkArc> arcs,
                       const BuildOptions& opts = {});

  const std::vector<NetworkArc>& arcs() const { return arcs_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  int num_interior() const { return interior_count_; }
  int num_boundary() const {
    return static_cast<int>(vertices_.size()) - interior_count_;
  }
  bool closed() const { return num_boundary() == 0; }

  // Indices into the storage vectors; throws std::out_of_range on unknown ids.
  int arc_index(int arc_id) const;
  int vertex_index(int vertex_id) const;
  const NetworkArc& arc_by_id(int arc_id) const { return arcs_[arc_index(arc_id)]; }
  const Vertex& vertex_by_id(int id) const { return vertices_[vertex_index(id)]; }

  // Vertex holding the given end of the given arc.
  const Vertex& vertex_at(int arc_id, Endpoint e) const;

  double total_length() const;
  double max_balance_residual() const;  // over interior vertices
  bool connected() const;

 private:
  std::vector<NetworkArc> arcs_;
  std::vector<Vertex> vertices_;
  int interior_count_ = 0;
};

// Orthonormal bases of the value space V1(P) (per-incident-arc values
// realizable as X . nu for one tangent vector X) and of its complement V2(P),
// for every interior vertex. Row order matches Vertex::ends.
struct VertexSpaces {
  struct Entry {
    int vertex_id = 0;
    Eigen::MatrixXd B1;  // j x k, orthonormal columns
    Eigen::MatrixXd B2;  // j x (j - k)
  };
  std::vector<Entry> entries;  // one per interior vertex, storage order

  const Entry& at(int vertex_id) const;
};

VertexSpaces vertex_spaces(const Network& net);

struct EulerCounts {
  int V = 0, E = 0, F = 0;
};

// V - E + F = 2 for a closed connected embedded network.
EulerCounts euler_counts(const Network& net);

// Splits arc arc_id at parameter t of its arc length, inserting one interior
// double vertex; both sub-arcs keep the parent pole. 0 < t < 1.
Network refine(const Network& net, int arc_id, double t);

// Reverses one arc: swaps start/end and negates the pole.
Network flip_orientation(const Network& net, int arc_id);

// ---------------------------------------------------------------------------
// Functions on a network.
//
// Per arc, a finite combination of oscillator modes
//   u(s) = sum_k A_k C(mu_k, s) + B_k S(mu_k, s),
// which covers eigenfunctions, rotation traces, locally constant functions
// and solutions with analytic sources.

struct ArcMode {
  double mu = 0.0;
  double A = 0.0;
  double B = 0.0;
};

struct ArcFunction {
  std::vector<ArcMode> modes;

  double value(double s) const;
  double deriv(double s) const;

  // Merges modes with equal mu and drops vanishing ones.
  void compress(double tol = 0.0);
};

struct NetworkFunction {
  std::vector<ArcFunction> arcs;  // indexed by arc storage order

  static NetworkFunction zero(const Network& net);
  static NetworkFunction single_mode(const Network& net,
                                     const std::vector<ArcMode>& per_arc);
};

// Value / outward derivative of f at the given end of an arc.
double end_value(const Network& net, const NetworkFunction& f, int arc_id,
                 Endpoint e);
double end_outward_derivative(const Network& net, const NetworkFunction& f,
                              int arc_id, Endpoint e);

// Values of f at a vertex, ordered like Vertex::ends.
Eigen::VectorXd vertex_values(const Network& net, const NetworkFunction& f,
                              int vertex_id);
Eigen::VectorXd vertex_outward_derivatives(const Network& net,
                                           const NetworkFunction& f,
                                           int vertex_id);

// Distance of f's vertex values from the admissible set: max over interior
// vertices of the residual of the projection onto V1(P), plus the max
// boundary value magnitude.
double admissibility_residual(const Network& net, const VertexSpaces& spaces,
                              const NetworkFunction& f);

// L2 inner product over the network. Closed form per matching-mode pair,
// composite Simpson (>= 64 panels per arc) otherwise.
double l2_inner_product(const Network& net, const NetworkFunction& f,
                        const NetworkFunction& g);
double l2_norm(const Network& net, const NetworkFunction& f);

// The bilinear integral sum_i int f' g' - d f g, with no admissibility
// requirements on the arguments.
double bilinear_form(const Network& net, const NetworkFunction& f,
                     const NetworkFunction& g, const Eigen::VectorXd& d_per_arc);

// Index form Q(f, g) = sum_i int f' g' - d f g over the arcs. Requires both
// functions value-admissible and zero on the boundary; throws
// std::invalid_argument otherwise.
double index_form(const Network& net, const VertexSpaces& spaces,
                  const NetworkFunction& f, const NetworkFunction& g,
                  const Eigen::VectorXd& d_per_arc);

// Canonical coordinates for per-(vertex, arc-end) values over a vertex
// subset: V(Q) for boundary subsets, V(Pbar) for partition cut sets.
struct TraceSpace {
  struct Slot {
    int vertex_id = 0;
    int end_ordinal = 0;  // position in Vertex::ends
  };
  std::vector<Slot> slots;

  int dim() const { return static_cast<int>(slots.size()); }
  static TraceSpace over(const Network& net, const std::vector<int>& vertex_ids);

  // Index of (vertex, ordinal) in slots; -1 if absent.
  int find(int vertex_id, int end_ordinal) const;
};

// Traces of f on a TraceSpace.
Eigen::VectorXd trace_values(const Network& net, const NetworkFunction& f,
                             const TraceSpace& ts);
Eigen::VectorXd trace_outward_derivatives(const Network& net,
                                          const NetworkFunction& f,
                                          const TraceSpace& ts);

}  // namespace geonet
