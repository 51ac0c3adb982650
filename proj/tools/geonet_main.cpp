// Command-line front end: catalog building, spectra, index/nullity, D-N maps
// and partition-theorem verification, all emitting machine-readable JSON.

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geonet/catalog.hpp"
#include "geonet/dtn.hpp"
#include "geonet/json_io.hpp"
#include "geonet/spectral.hpp"

namespace {

constexpr const char* kVersion = "geonet 1.0.0";

// Exit codes: 0 success/verified, 1 computed-but-failed verification,
// 2 input or usage error.
constexpr int kExitOk = 0;
constexpr int kExitFailedVerification = 1;
constexpr int kExitInputError = 2;

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_file(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct GlobalFlags {
  std::string out;
  bool quiet = false;
  uint64_t seed = 0;
  double tol = 1e-6;  // zero band for index/nullity classification
};

nlohmann::json run_report(const GlobalFlags& g, const std::string& command,
                          const std::map<std::string, std::string>& input_hashes,
                          nlohmann::json results) {
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = input_hashes;
  j["version"] = kVersion;
  j["seed"] = g.seed;
  j["results"] = std::move(results);
  return j;
}

void emit(const GlobalFlags& g, const nlohmann::json& j) {
  if (!g.out.empty()) {
    geonet::write_json_atomic(g.out, j);
  } else if (!g.quiet) {
    std::cout << j.dump(2) << "\n";
  }
}

geonet::ScanOptions scan_options(const GlobalFlags& g) {
  geonet::ScanOptions opts;
  opts.zero_band = g.tol;
  return opts;
}

bool is_triple_junction(const geonet::Network& net) {
  if (!net.closed()) return false;
  for (const auto& v : net.vertices()) {
    if (v.ends.size() != 3) return false;
  }
  return true;
}

int cmd_catalog(const GlobalFlags& g, const std::string& action,
                const std::string& name) {
  if (action == "list") {
    for (const auto& e : geonet::catalog_entries()) {
      std::cout << e.name << " V=" << e.V << " E=" << e.E << " F=" << e.F << " ("
                << e.construction << ")\n";
    }
    return kExitOk;
  }
  const geonet::Network net = geonet::catalog_build(name);
  emit(g, geonet::network_to_json(net));
  if (!g.quiet) {
    std::cerr << "built " << name << ": E=" << net.num_arcs()
              << " balance=" << net.max_balance_residual() << "\n";
  }
  return kExitOk;
}

int cmd_index(const GlobalFlags& g, const std::string& net_path, double d,
              bool has_window, double wlo, double whi) {
  const std::string raw = read_file(net_path);
  const geonet::Network net =
      geonet::network_from_json(nlohmann::json::parse(raw));
  if (!net.closed() && !has_window) {
    std::cerr << "error: open network requires --window\n";
    return kExitInputError;
  }
  const auto prob = geonet::SpectralProblem::make(net, d);
  geonet::ScanOptions opts = scan_options(g);
  geonet::IndexNullity in;
  if (has_window) {
    const geonet::Spectrum spec = geonet::eigenvalues(prob, wlo, whi, opts);
    for (const auto& c : spec.clusters) {
      if (c.lambda < -opts.zero_band) {
        in.index += c.multiplicity;
      } else if (c.lambda <= opts.zero_band) {
        in.nullity += c.multiplicity;
      }
    }
  } else {
    in = geonet::index_nullity(prob, opts);
  }

  nlohmann::json results;
  results["index"] = in.index;
  results["nullity"] = in.nullity;
  std::ostringstream line;
  line << "Ind=" << in.index << " Nul=" << in.nullity;
  bool verdict_ok = true;
  if (is_triple_junction(net)) {
    const auto counts = geonet::euler_counts(net);
    const bool pass = in.index == counts.F - 1 && in.nullity == 3;
    results["faces"] = counts.F;
    results["theorem_check"] = pass;
    line << (pass ? " PASS" : " FAIL");
    verdict_ok = pass;
  }
  std::cout << line.str() << "\n";
  emit(g, run_report(g, "index", {{"net", hex64(fnv1a(raw))}}, results));
  return verdict_ok ? kExitOk : kExitFailedVerification;
}

int cmd_spectrum(const GlobalFlags& g, const std::string& net_path, double d,
                 double wlo, double whi, const std::string& trace_path) {
  const std::string raw = read_file(net_path);
  const geonet::Network net =
      geonet::network_from_json(nlohmann::json::parse(raw));
  const auto prob = geonet::SpectralProblem::make(net, d);
  if (wlo < -prob.max_d() - 1e-9) {
    std::cerr << "warning: window clipped at the spectral floor " << -prob.max_d()
              << "\n";
  }
  const geonet::Spectrum spec = geonet::eigenvalues(prob, wlo, whi, scan_options(g));
  if (!trace_path.empty()) {
    const auto tr = geonet::sigma_min_trace(prob, std::max(wlo, -prob.max_d() - 1e-9),
                                            whi, 1e-2);
    std::ofstream out(trace_path, std::ios::trunc);
    out << "lambda,sigma_min\n";
    for (const auto& [lam, sig] : tr) {
      out << lam << "," << sig << "\n";
    }
  }
  emit(g, geonet::spectrum_to_json(net, spec));
  if (!g.quiet) {
    for (const auto& c : spec.clusters) {
      std::cout << "lambda=" << c.lambda << " multiplicity=" << c.multiplicity
                << "\n";
    }
  }
  return kExitOk;
}

int cmd_dtn(const GlobalFlags& g, const std::string& net_path,
            const std::vector<int>& boundary_ids) {
  const std::string raw = read_file(net_path);
  const geonet::Network net =
      geonet::network_from_json(nlohmann::json::parse(raw));
  const auto prob = geonet::SpectralProblem::make(net);
  std::vector<int> ids = boundary_ids;
  if (ids.empty()) {
    for (const auto& v : net.vertices()) {
      if (v.boundary) ids.push_back(v.id);
    }
  }
  const geonet::DtnMap map = geonet::dtn_map(prob, ids);
  emit(g, dtn_to_json(map));
  return kExitOk;
}

int cmd_verify(const GlobalFlags& g, const std::string& net_path,
               const std::string& part_path) {
  const std::string raw_net = read_file(net_path);
  const std::string raw_part = read_file(part_path);
  const geonet::Network net =
      geonet::network_from_json(nlohmann::json::parse(raw_net));
  const geonet::Partition part =
      geonet::partition_from_json(net, nlohmann::json::parse(raw_part));
  const geonet::VerificationReport rep =
      geonet::verify_partition(part, scan_options(g));
  for (const auto* t :
       {&rep.index_theorem, &rep.nullity_theorem, &rep.sum_corollary}) {
    std::cout << t->name << ": lhs=" << t->lhs << " rhs=" << t->rhs << " "
              << (t->pass ? "PASS" : "FAIL") << "\n";
  }
  emit(g, run_report(g, "verify",
                     {{"net", hex64(fnv1a(raw_net))},
                      {"partition", hex64(fnv1a(raw_part))}},
                     verification_to_json(rep)));
  return rep.all_pass ? kExitOk : kExitFailedVerification;
}

int cmd_refine(const GlobalFlags& g, const std::string& net_path, int arc_id,
               double t) {
  const geonet::Network net =
      geonet::network_from_json(parse_file(net_path));
  emit(g, geonet::network_to_json(geonet::refine(net, arc_id, t)));
  return kExitOk;
}

int cmd_flip(const GlobalFlags& g, const std::string& net_path, int arc_id) {
  const geonet::Network net =
      geonet::network_from_json(parse_file(net_path));
  emit(g, geonet::network_to_json(geonet::flip_orientation(net, arc_id)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for geodesic networks on the 2-sphere"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalFlags g;
  app.add_option("--out", g.out, "output file (JSON)");
  app.add_flag("--quiet", g.quiet, "suppress console output");
  app.add_option("--seed", g.seed, "seed echoed into reports");
  app.add_option("--tol", g.tol, "zero-classification band for eigenvalues");

  auto* catalog = app.add_subcommand("catalog", "list or build the net catalog");
  std::string cat_action, cat_name;
  catalog->add_option("action", cat_action, "list | build")->required();
  catalog->add_option("name", cat_name, "entry name for build");

  std::string net_path, part_path, trace_path;
  double d = 1.0, wlo = -1.5, whi = 0.5, tparam = 0.5;
  int arc_id = 0;
  std::vector<int> boundary_ids;
  std::vector<double> window;

  auto* index = app.add_subcommand("index", "Morse index and nullity");
  index->add_option("--net", net_path, "network JSON")->required();
  index->add_option("--d", d, "potential (constant per arc)");
  index->add_option("--window", window, "scan window lo hi")->expected(2);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a window");
  spectrum->add_option("--net", net_path, "network JSON")->required();
  spectrum->add_option("--d", d, "potential (constant per arc)");
  spectrum->add_option("--window", window, "scan window lo hi")
      ->expected(2)
      ->required();
  spectrum->add_option("--trace", trace_path, "write sigma_min(lambda) CSV");

  auto* dtn = app.add_subcommand("dtn", "Dirichlet-to-Neumann map");
  dtn->add_option("--net", net_path, "network JSON")->required();
  dtn->add_option("--boundary", boundary_ids, "boundary vertex ids (subset)");

  auto* verify = app.add_subcommand("verify", "partition decomposition theorems");
  verify->add_option("--net", net_path, "network JSON")->required();
  verify->add_option("--partition", part_path, "partition JSON")->required();

  auto* refine = app.add_subcommand("refine", "split an arc");
  refine->add_option("--net", net_path, "network JSON")->required();
  refine->add_option("--arc", arc_id, "arc id")->required();
  refine->add_option("--t", tparam, "split parameter in (0,1)");

  auto* flip = app.add_subcommand("flip", "reverse an arc's orientation");
  flip->add_option("--net", net_path, "network JSON")->required();
  flip->add_option("--arc", arc_id, "arc id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  const auto started = std::chrono::steady_clock::now();
  auto finish = [&](int code) {
    if (!g.quiet) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
      std::cerr << "wall_ms=" << ms << "\n";
    }
    return code;
  };

  try {
    if (catalog->parsed()) {
      if (cat_action == "list") return cmd_catalog(g, "list", "");
      if (cat_action == "build") {
        if (cat_name.empty()) {
          std::cerr << "error: catalog build needs a name\n";
          return kExitInputError;
        }
        return finish(cmd_catalog(g, "build", cat_name));
      }
      std::cerr << "error: unknown catalog action '" << cat_action << "'\n";
      return kExitInputError;
    }
    if (index->parsed()) {
      return finish(cmd_index(g, net_path, d, window.size() == 2,
                              window.size() == 2 ? window[0] : 0.0,
                              window.size() == 2 ? window[1] : 0.0));
    }
    if (spectrum->parsed()) {
      return finish(cmd_spectrum(g, net_path, d, window[0], window[1], trace_path));
    }
    if (dtn->parsed()) return finish(cmd_dtn(g, net_path, boundary_ids));
    if (verify->parsed()) return finish(cmd_verify(g, net_path, part_path));
    if (refine->parsed()) return finish(cmd_refine(g, net_path, arc_id, tparam));
    if (flip->parsed()) return finish(cmd_flip(g, net_path, arc_id));
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedVerification;
  }
  return kExitInputError;
}
