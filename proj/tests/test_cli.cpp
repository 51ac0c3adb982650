// Exercises the command-line tool end to end: exit codes, file outputs and
// byte-level reproducibility. argv[1] is the path to the binary.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "geonet/json_io.hpp"
#include "support.hpp"

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << "\n";
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cli {
  std::string bin;
  std::string dir;

  int run(const std::string& args, const std::string& log = "/dev/null") const {
    const std::string cmd = bin + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <path-to-geonet-binary>\n";
    return 2;
  }
  Cli cli{argv[1], "/tmp/geonet_cli_test"};
  (void)!std::system(("mkdir -p " + cli.dir).c_str());
  const std::string net = cli.dir + "/net.json";
  const std::string log = cli.dir + "/log.txt";

  // catalog list prints ten entries
  expect(cli.run("catalog list", log) == 0, "catalog list exit 0");
  {
    std::ifstream in(log);
    int lines = 0;
    std::string s;
    while (std::getline(in, s)) {
      if (!s.empty()) ++lines;
    }
    expect(lines == 10, "catalog list prints 10 entries");
  }

  // unknown entry -> exit 2
  expect(cli.run("catalog build icosahedron") == 2, "unknown catalog name exit 2");

  // build writes a parseable network with six arcs of length arccos(-1/3)
  expect(cli.run("--out " + net + " catalog build tetrahedron") == 0,
         "catalog build exit 0");
  {
    const auto j = nlohmann::json::parse(slurp(net));
    expect(j.at("arcs").size() == 6, "tetrahedron has 6 arcs");
    const double l = std::acos(-1.0 / 3.0);
    for (const auto& a : j.at("arcs")) {
      expect(std::abs(a.at("length").get<double>() - l) < 1e-10,
             "arc length arccos(-1/3)");
    }

    // Round trip: parse -> rebuild -> serialize is byte-identical.
    const geonet::Network parsed = geonet::network_from_json(j);
    const std::string again = geonet::network_to_json(parsed).dump(2) + "\n";
    expect(again == slurp(net), "network round trip byte-identical");
  }

  // index prints the theorem check and exits 0
  expect(cli.run("index --net " + net, log) == 0, "index exit 0");
  expect(slurp(log).find("Ind=3 Nul=3 PASS") != std::string::npos,
         "index prints Ind=3 Nul=3 PASS");

  // spectrum with a trace CSV
  const std::string spec = cli.dir + "/spec.json";
  const std::string csv = cli.dir + "/trace.csv";
  expect(cli.run("--out " + spec + " spectrum --net " + net +
                 " --window -1.5 0.5 --trace " + csv) == 0,
         "spectrum exit 0");
  {
    const auto j = nlohmann::json::parse(slurp(spec));
    expect(j.at("eigenvalues").size() == 2, "tetrahedron has two clusters");
    expect(j.at("eigenvalues")[0].at("multiplicity") == 3, "index cluster x3");
    expect(j.at("eigenvalues")[1].at("multiplicity") == 3, "null cluster x3");
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    expect(header == "lambda,sigma_min", "trace header");
    double prev = -1e300, lam, sig;
    char comma;
    int rows = 0, positive = 0;
    while (in >> lam >> comma >> sig) {
      expect(lam > prev, "trace lambda column monotone");
      prev = lam;
      ++rows;
      if (sig > 1e-6) ++positive;
    }
    expect(rows > 100, "trace has rows");
    expect(positive > rows - 10, "sigma_min positive away from eigenvalues");
  }

  // circle net: no PASS token (not a triple-junction net)
  const std::string circle = cli.dir + "/circle.json";
  geonet::write_json_atomic(
      circle, geonet::network_to_json(geonet::testsupport::circle_two_arcs()));
  expect(cli.run("index --net " + circle, log) == 0, "circle index exit 0");
  {
    const std::string out = slurp(log);
    expect(out.find("Ind=1 Nul=2") != std::string::npos, "circle Ind=1 Nul=2");
    expect(out.find("PASS") == std::string::npos, "no PASS line for the circle");
  }

  // dtn on a single arc reproduces the cot/-csc matrix
  const std::string arc = cli.dir + "/arc.json";
  const std::string dtn = cli.dir + "/dtn.json";
  geonet::write_json_atomic(
      arc, geonet::network_to_json(geonet::testsupport::single_arc(1.0)));
  expect(cli.run("--out " + dtn + " dtn --net " + arc) == 0, "dtn exit 0");
  {
    const auto j = nlohmann::json::parse(slurp(dtn));
    const double cot = std::cos(1.0) / std::sin(1.0);
    expect(std::abs(j.at("matrix")[0][0].get<double>() - cot) < 1e-9,
           "dtn diagonal cot(l)");
  }

  // verify: a valid partition passes, a corrupted file exits 2
  const std::string part = cli.dir + "/part.json";
  {
    const geonet::Network tet =
        geonet::network_from_json(nlohmann::json::parse(slurp(net)));
    const geonet::Partition p = geonet::testsupport::tetrahedron_partition(tet);
    geonet::write_json_atomic(cli.dir + "/refined.json",
                              geonet::network_to_json(p.parent));
    geonet::write_json_atomic(part, geonet::partition_to_json(p));
  }
  expect(cli.run("verify --net " + cli.dir + "/refined.json --partition " + part,
                 log) == 0,
         "verify exit 0");
  expect(slurp(log).find("PASS") != std::string::npos, "verify prints PASS");

  {
    std::ofstream bad(cli.dir + "/bad.json");
    bad << "{\"pieces\": [{\"arc_ids\": [1, 2]}], \"cut_vertices\": [1]";
  }
  expect(cli.run("verify --net " + net + " --partition " + cli.dir + "/bad.json") ==
             2,
         "corrupted partition exit 2");

  // open network without a window -> exit 2
  expect(cli.run("index --net " + arc) == 2, "open net without window exit 2");
  // with a window it computes
  expect(cli.run("index --net " + arc + " --window -1.5 12.0", log) == 0,
         "open net with window exit 0");

  // reports are byte-identical across runs and thread counts
  {
    const std::string r1 = cli.dir + "/rep1.json", r2 = cli.dir + "/rep2.json";
    expect(cli.run("--out " + r1 + " index --net " + net, log) == 0, "report 1");
    expect(cli.run("--out " + r2 + " index --net " + net, log) == 0, "report 2");
    expect(slurp(r1) == slurp(r2), "identical inputs give byte-identical reports");
    const std::string s1 = cli.dir + "/s1.json", s2 = cli.dir + "/s2.json";
    (void)!std::system(("GEONET_THREADS=1 " + cli.bin + " --out " + s1 +
                        " spectrum --net " + net +
                        " --window -1.5 0.5 > /dev/null 2>&1")
                           .c_str());
    (void)!std::system(("GEONET_THREADS=4 " + cli.bin + " --out " + s2 +
                        " spectrum --net " + net +
                        " --window -1.5 0.5 > /dev/null 2>&1")
                           .c_str());
    expect(slurp(s1) == slurp(s2) && !slurp(s1).empty(),
           "scan results independent of the thread count");
  }

  // refine and flip produce valid networks
  expect(cli.run("--out " + cli.dir + "/r.json refine --net " + net +
                 " --arc 1 --t 0.5") == 0,
         "refine exit 0");
  expect(cli.run("--out " + cli.dir + "/f.json flip --net " + net + " --arc 2") ==
             0,
         "flip exit 0");
  {
    const auto r = nlohmann::json::parse(slurp(cli.dir + "/r.json"));
    expect(r.at("arcs").size() == 7, "refined net has 7 arcs");
  }

  if (failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cout << "test_cli: " << failures << " checks FAILED\n";
  return 1;
}
