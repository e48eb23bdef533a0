#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gravcat/cost_matrix.hpp"
#include "gravcat/equity.hpp"
#include "gravcat/opportunity.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

enum class Layout : std::uint8_t { grid, radial };

/// Everything needed to build a reproducible synthetic city. Identical
/// config (including seed) gives a byte-identical city. `*_gamma` controls
/// core peaking: values are proportional to exp(-gamma * d_center_km), so
/// gamma = 0 means uniform.
struct SyntheticCityConfig {
  Layout layout = Layout::grid;
  std::uint32_t grid_rows = 10;
  std::uint32_t grid_cols = 10;
  std::uint32_t radial_rings = 5;
  std::uint32_t radial_per_ring = 12;
  double spacing_km = 1.0;
  double origin_lat = 41.88;
  double origin_lon = -87.63;

  double population_scale = 1000.0;
  double population_gamma = 0.0;
  double worker_share = 0.6;
  double opportunity_scale = 100.0;
  std::map<std::string, double> opportunity_gamma;  // kind -> gamma, absent = 0
  double jitter = 0.0;  // multiplicative half-range on counts, in [0, 1)

  // Road edge speeds; keep them at or below the assumed maximum modal speeds
  // when straight-line efficiency bounds are being studied.
  double drive_mph = 30.0;
  double walk_mph = 3.0;
  double bike_mph = 10.0;

  // Sprawl: edges far from the core get removed with probability
  // edge_removal * d_norm and slowed by the factor 1/(1 + speed_decay * d_norm).
  double sprawl_edge_removal = 0.0;
  double sprawl_speed_decay = 0.0;

  // Disadvantage factors: gradient * d_norm + (1 - gradient) * uniform draw.
  double sedi_gradient = 0.5;

  std::uint64_t seed = 1;
};

struct RoadGraph {
  struct Edge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double length_km = 0.0;
    std::array<double, kModeCount> speed_mph = {0, 0, 0};
  };
  std::size_t n_nodes = 0;
  std::vector<Edge> edges;
  bool connected = true;  // false when sprawl removal disconnected the graph
};

struct SyntheticCity {
  ZoneSet zones;
  OpportunityTable opportunities;
  RoadGraph graph;
  SediFactors factors;
};

/// Zone ids are "Z" plus a fixed-width index, so ascending id order equals
/// construction order and graph node k is zone index k.
SyntheticCity generate(const SyntheticCityConfig& config);

/// Per-origin shortest-path travel times in minutes over the road graph,
/// stopping each search once every node within `max_threshold` is settled.
/// Unreachable or too-far pairs are simply absent; self times are 0.
CostMatrix travel_time_matrix(const RoadGraph& graph, Mode mode,
                              double max_threshold, int threads = 0);

}  // namespace gravcat
