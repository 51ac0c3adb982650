#pragma once

#include <string>
#include <vector>

#include "geonet/network.hpp"

namespace geonet {

struct CatalogEntry {
  std::string name;
  int V = 0, E = 0, F = 0;
  std::string construction;  // explicit | one-parameter | optimized
};

// The ten equiangular nets, in increasing face count.
const std::vector<CatalogEntry>& catalog_entries();

// Builds a stationary embedded network by name; throws std::invalid_argument
// for unknown names and std::runtime_error if the optimizer fails to reach
// the balance tolerance.
Network catalog_build(const std::string& name);

struct StationarizeResult {
  Network net;
  int iterations = 0;
  double residual = 0.0;
  // Merit ||F||^2 of the balance system after each accepted step.
  std::vector<double> merit_history;
  std::vector<double> length_history;
};

// Moves interior vertices on the sphere until every junction balances:
// damped Gauss-Newton on the stacked tangential balance residuals, with a
// backtracking line search on the squared residual, followed by full-step
// polish iterations. Arcs are rebuilt as minor great arcs between the moved
// endpoints, keeping each arc's orientation.
StationarizeResult stationarize(const Network& net, int max_iters = 200,
                                double tol = 1e-10);

// Prism nets: solves the one-dimensional balance equation for the latitude
// of the 2n prism vertices by bisection; returns (latitude, network).
// n must be 3 or 5.
std::pair<double, Network> stationarize_latitude(int n);

// Convenience: network from vertex positions and directed vertex-id pairs;
// arcs are minor great arcs, ids 1..E in input order.
Network network_from_edges(const std::vector<std::pair<int, Vec3>>& vertices,
                           const std::vector<std::pair<int, int>>& edges,
                           const BuildOptions& opts = {});

}  // namespace geonet
