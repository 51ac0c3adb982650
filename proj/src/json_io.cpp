#include "geonet/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace geonet {

using nlohmann::json;

nlohmann::json network_to_json(const Network& net) {
  json j;
  j["vertices"] = json::array();
  for (const auto& v : net.vertices()) {
    j["vertices"].push_back({{"id", v.id},
                             {"xyz", {v.pos.x(), v.pos.y(), v.pos.z()}},
                             {"boundary", v.boundary}});
  }
  j["arcs"] = json::array();
  for (const auto& na : net.arcs()) {
    j["arcs"].push_back(
        {{"id", na.id},
         {"start_vertex", na.start_vertex},
         {"end_vertex", na.end_vertex},
         {"pole", {na.arc.pole.x(), na.arc.pole.y(), na.arc.pole.z()}},
         {"length", na.arc.length}});
  }
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  std::vector<Vertex> verts;
  for (const auto& vj : j.at("vertices")) {
    Vertex v;
    v.id = vj.at("id").get<int>();
    const auto& xyz = vj.at("xyz");
    v.pos = Vec3(xyz.at(0).get<double>(), xyz.at(1).get<double>(),
                 xyz.at(2).get<double>());
    v.boundary = vj.at("boundary").get<bool>();
    verts.push_back(v);
  }
  std::vector<NetworkArc> arcs;
  std::map<int, Vec3> pos;
  for (const auto& v : verts) pos[v.id] = normalized(v.pos);
  for (const auto& aj : j.at("arcs")) {
    NetworkArc na;
    na.id = aj.at("id").get<int>();
    na.start_vertex = aj.at("start_vertex").get<int>();
    na.end_vertex = aj.at("end_vertex").get<int>();
    const auto& p = aj.at("pole");
    const Vec3 pole(p.at(0).get<double>(), p.at(1).get<double>(),
                    p.at(2).get<double>());
    na.arc = GreatArc::make(pos.at(na.start_vertex), pole,
                            aj.at("length").get<double>());
    arcs.push_back(na);
  }
  return Network::build(std::move(verts), std::move(arcs));
}

nlohmann::json spectrum_to_json(const Network& net, const Spectrum& spec) {
  json j;
  j["eigenvalues"] = json::array();
  j["eigenfunctions"] = json::array();
  for (const auto& c : spec.clusters) {
    j["eigenvalues"].push_back(
        {{"lambda", c.lambda}, {"multiplicity", c.multiplicity}});
    for (const auto& f : c.eigenfunctions) {
      json fj;
      fj["lambda"] = c.lambda;
      fj["arcs"] = json::array();
      for (int i = 0; i < net.num_arcs(); ++i) {
        double A = 0.0, B = 0.0;
        for (const auto& m : f.arcs[i].modes) {
          A += m.A;
          B += m.B;
        }
        fj["arcs"].push_back({{"id", net.arcs()[i].id}, {"A", A}, {"B", B}});
      }
      j["eigenfunctions"].push_back(std::move(fj));
    }
  }
  if (!spec.warnings.empty()) j["warnings"] = spec.warnings;
  return j;
}

nlohmann::json partition_to_json(const Partition& part) {
  json j;
  j["pieces"] = json::array();
  for (const auto& ids : part.piece_arc_ids) {
    j["pieces"].push_back({{"arc_ids", ids}});
  }
  j["cut_vertices"] = part.cut_ids;
  return j;
}

Partition partition_from_json(const Network& parent, const nlohmann::json& j) {
  std::vector<std::vector<int>> groups;
  for (const auto& pj : j.at("pieces")) {
    groups.push_back(pj.at("arc_ids").get<std::vector<int>>());
  }
  return Partition::make(parent, std::move(groups),
                         j.at("cut_vertices").get<std::vector<int>>());
}

nlohmann::json dtn_to_json(const DtnMap& map) {
  json j;
  j["slots"] = json::array();
  for (const auto& s : map.space.slots) {
    j["slots"].push_back({{"vertex", s.vertex_id}, {"end", s.end_ordinal}});
  }
  auto mat = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["basis"] = mat(map.basis);
  j["matrix"] = mat(map.matrix);
  j["eigenvalues"] = std::vector<double>(
      map.eigenvalues.data(), map.eigenvalues.data() + map.eigenvalues.size());
  return j;
}

nlohmann::json verification_to_json(const VerificationReport& rep) {
  auto theorem = [](const TheoremReport& t) {
    json j;
    j["name"] = t.name;
    j["lhs"] = t.lhs;
    j["rhs"] = t.rhs;
    j["pass"] = t.pass;
    j["details"] = t.details;
    return j;
  };
  json j;
  j["index_theorem"] = theorem(rep.index_theorem);
  j["nullity_theorem"] = theorem(rep.nullity_theorem);
  j["sum_corollary"] = theorem(rep.sum_corollary);
  j["dims"] = rep.dims;
  j["all_pass"] = rep.all_pass;
  return j;
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace geonet
