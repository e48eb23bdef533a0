#include "gravcat/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gravcat/geo.hpp"
#include "gravcat/parallel.hpp"
#include "gravcat/rng.hpp"
#include "gravcat/units.hpp"

namespace gravcat {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKmPerDegree = kEarthRadiusKm * kPi / 180.0;

std::string zone_id(std::uint32_t index, std::uint32_t n) {
  std::size_t width = 1;
  for (std::uint32_t v = (n > 0 ? n - 1 : 0); v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return "Z" + std::string(width - digits.size(), '0') + digits;
}

void validate(const SyntheticCityConfig& c) {
  const bool zones_ok = (c.layout == Layout::grid)
                            ? (c.grid_rows >= 1 && c.grid_cols >= 1)
                            : (c.radial_rings >= 0 && c.radial_per_ring >= 1);
  if (!zones_ok) throw Error(ErrorCode::InvalidConfig, "city must have at least one zone");
  if (!(c.spacing_km > 0.0) || !std::isfinite(c.spacing_km)) {
    throw Error(ErrorCode::InvalidConfig, "spacing must be positive and finite");
  }
  if (!coordinates_valid(c.origin_lat, c.origin_lon)) {
    throw Error(ErrorCode::InvalidCoordinate, "city origin is out of range");
  }
  for (double v : {c.population_scale, c.opportunity_scale}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, "scales must be finite and >= 0");
    }
  }
  for (const auto& [kind, gamma] : c.opportunity_gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "profile gamma must be finite and >= 0");
    }
  }
  if (!std::isfinite(c.population_gamma) || c.population_gamma < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "profile gamma must be finite and >= 0");
  }
  if (!(c.worker_share >= 0.0) || !std::isfinite(c.worker_share)) {
    throw Error(ErrorCode::InvalidConfig, "worker share must be finite and >= 0");
  }
  if (!(c.jitter >= 0.0) || c.jitter >= 1.0) {
    throw Error(ErrorCode::InvalidConfig, "jitter must lie in [0, 1)");
  }
  for (double v : {c.drive_mph, c.walk_mph, c.bike_mph}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidSpeed, "edge speeds must be positive and finite");
    }
  }
  if (!(c.sprawl_edge_removal >= 0.0) || c.sprawl_edge_removal > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "edge removal fraction must lie in [0, 1]");
  }
  if (!(c.sprawl_speed_decay >= 0.0) || !std::isfinite(c.sprawl_speed_decay)) {
    throw Error(ErrorCode::InvalidConfig, "speed decay must be finite and >= 0");
  }
  if (!(c.sedi_gradient >= 0.0) || c.sedi_gradient > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "disadvantage gradient must lie in [0, 1]");
  }
}

struct Placement {
  std::vector<LatLon> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  LatLon center;
};

// Lattice around the origin: north-south spacing is constant in latitude,
// east-west spacing is scaled by cos(latitude) per row so neighbors sit
// `spacing_km` apart.
Placement place_grid(const SyntheticCityConfig& c) {
  Placement out;
  const double dlat = c.spacing_km / kKmPerDegree;
  out.nodes.reserve(static_cast<std::size_t>(c.grid_rows) * c.grid_cols);
  for (std::uint32_t r = 0; r < c.grid_rows; ++r) {
    const double lat = c.origin_lat + r * dlat;
    const double dlon = c.spacing_km / (kKmPerDegree * std::cos(lat * kPi / 180.0));
    for (std::uint32_t col = 0; col < c.grid_cols; ++col) {
      out.nodes.push_back({lat, c.origin_lon + col * dlon});
    }
  }
  auto at = [&](std::uint32_t r, std::uint32_t col) { return r * c.grid_cols + col; };
  for (std::uint32_t r = 0; r < c.grid_rows; ++r) {
    for (std::uint32_t col = 0; col < c.grid_cols; ++col) {
      if (col + 1 < c.grid_cols) out.edges.push_back({at(r, col), at(r, col + 1)});
      if (r + 1 < c.grid_rows) out.edges.push_back({at(r, col), at(r + 1, col)});
    }
  }
  const double mid_lat = c.origin_lat + (c.grid_rows - 1) * dlat / 2.0;
  const double mid_dlon = c.spacing_km / (kKmPerDegree * std::cos(mid_lat * kPi / 180.0));
  out.center = {mid_lat, c.origin_lon + (c.grid_cols - 1) * mid_dlon / 2.0};
  return out;
}

// Hub and spokes: a center node, then rings of `per_ring` nodes connected
// along each ring and radially to the neighbor rings.
Placement place_radial(const SyntheticCityConfig& c) {
  Placement out;
  out.center = {c.origin_lat, c.origin_lon};
  out.nodes.push_back(out.center);
  for (std::uint32_t ring = 1; ring <= c.radial_rings; ++ring) {
    const double radius = ring * c.spacing_km;
    for (std::uint32_t k = 0; k < c.radial_per_ring; ++k) {
      const double theta = 2.0 * kPi * k / c.radial_per_ring;
      const double lat = c.origin_lat + radius * std::cos(theta) / kKmPerDegree;
      const double lon = c.origin_lon + radius * std::sin(theta) /
                                            (kKmPerDegree * std::cos(lat * kPi / 180.0));
      out.nodes.push_back({lat, lon});
    }
  }
  auto at = [&](std::uint32_t ring, std::uint32_t k) {
    return 1 + (ring - 1) * c.radial_per_ring + (k % c.radial_per_ring);
  };
  for (std::uint32_t ring = 1; ring <= c.radial_rings; ++ring) {
    for (std::uint32_t k = 0; k < c.radial_per_ring; ++k) {
      // a two-node ring needs a single edge, not two parallel ones
      if (c.radial_per_ring > 2 || (c.radial_per_ring == 2 && k == 0)) {
        out.edges.push_back({at(ring, k), at(ring, k + 1)});
      }
      if (ring == 1) {
        out.edges.push_back({0, at(1, k)});
      } else {
        out.edges.push_back({at(ring - 1, k), at(ring, k)});
      }
    }
  }
  return out;
}

bool is_connected(std::size_t n, const std::vector<RoadGraph::Edge>& edges) {
  if (n == 0) return true;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint32_t> stack = {0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    for (std::uint32_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

SyntheticCity generate(const SyntheticCityConfig& config) {
  validate(config);
  const Placement placed =
      config.layout == Layout::grid ? place_grid(config) : place_radial(config);
  const auto n = static_cast<std::uint32_t>(placed.nodes.size());

  // distance from the city center, normalized by the maximum
  std::vector<double> d_center(n), d_norm(n);
  double d_max = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    d_center[i] = haversine_km(placed.nodes[i], placed.center);
    d_max = std::max(d_max, d_center[i]);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    d_norm[i] = d_max > 0.0 ? d_center[i] / d_max : 0.0;
  }

  SplitMix64 rng(config.seed);

  // zones: one RNG draw per zone for the population jitter, always consumed
  // so the stream layout is independent of the jitter amplitude
  std::vector<Zone> zones(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double jit = 1.0 + config.jitter * (2.0 * rng.uniform01() - 1.0);
    const double pop =
        config.population_scale * std::exp(-config.population_gamma * d_center[i]) * jit;
    zones[i].id = zone_id(i, n);
    zones[i].centroid_lat = placed.nodes[i].lat;
    zones[i].centroid_lon = placed.nodes[i].lon;
    zones[i].population = pop;
    zones[i].workers = config.worker_share * pop;
  }

  SyntheticCity city{ZoneSet(std::move(zones)), OpportunityTable(n), RoadGraph{},
                     SediFactors(n)};

  // opportunity kinds: the defaults plus any extra kinds named in the config
  for (const auto& [kind, gamma] : config.opportunity_gamma) {
    (void)gamma;
    city.opportunities.ensure_kind(kind);
  }
  const auto kind_names = city.opportunities.kind_names();
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t kidx = 0; kidx < kind_names.size(); ++kidx) {
      const auto it = config.opportunity_gamma.find(kind_names[kidx]);
      const double gamma = it != config.opportunity_gamma.end() ? it->second : 0.0;
      const double jit = 1.0 + config.jitter * (2.0 * rng.uniform01() - 1.0);
      city.opportunities.set(
          i, kidx, config.opportunity_scale * std::exp(-gamma * d_center[i]) * jit);
    }
  }

  // disadvantage factors in [0, 1]: a radial gradient blended with noise
  for (std::uint32_t i = 0; i < n; ++i) {
    std::array<double, kSediFactorCount> row;
    for (std::size_t f = 0; f < kSediFactorCount; ++f) {
      row[f] = config.sedi_gradient * d_norm[i] +
               (1.0 - config.sedi_gradient) * rng.uniform01();
    }
    city.factors.set_zone(i, row);
  }

  // road edges; sprawl removes and slows edges away from the core
  city.graph.n_nodes = n;
  for (const auto& [a, b] : placed.edges) {
    const double removal_u = rng.uniform01();  // always drawn, stream-stable
    const LatLon mid{(placed.nodes[a].lat + placed.nodes[b].lat) / 2.0,
                     (placed.nodes[a].lon + placed.nodes[b].lon) / 2.0};
    const double mid_norm =
        d_max > 0.0 ? haversine_km(mid, placed.center) / d_max : 0.0;
    if (removal_u < config.sprawl_edge_removal * mid_norm) continue;
    const double slow = 1.0 / (1.0 + config.sprawl_speed_decay * mid_norm);
    RoadGraph::Edge e;
    e.a = a;
    e.b = b;
    e.length_km = haversine_km(placed.nodes[a], placed.nodes[b]);
    e.speed_mph = {config.drive_mph * slow, config.walk_mph * slow,
                   config.bike_mph * slow};
    city.graph.edges.push_back(e);
  }
  city.graph.connected = is_connected(n, city.graph.edges);
  return city;
}

CostMatrix travel_time_matrix(const RoadGraph& graph, Mode mode,
                              double max_threshold, int threads) {
  if (!(max_threshold > 0.0) || !std::isfinite(max_threshold)) {
    throw Error(ErrorCode::InvalidConfig, "max_threshold must be positive and finite");
  }
  const std::size_t n = graph.n_nodes;
  // adjacency with edge times in minutes for this mode
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
  for (const auto& e : graph.edges) {
    const double v = mph_to_km_per_min(e.speed_mph[static_cast<int>(mode)]);
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidSpeed, "edge speed must be positive");
    const double minutes = e.length_km / v;
    adj[e.a].emplace_back(e.b, minutes);
    adj[e.b].emplace_back(e.a, minutes);
  }

  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> touched;
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::size_t origin = begin; origin < end; ++origin) {
      const auto o = static_cast<std::uint32_t>(origin);
      dist[o] = 0.0;
      touched.push_back(o);
      heap.push({0.0, o});
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > max_threshold) break;  // every remaining node is further out
        if (d > dist[u]) continue;     // stale heap entry
        if (u != o) rows[origin].emplace_back(u, d);
        for (const auto& [v, w] : adj[u]) {
          const double nd = d + w;
          if (nd < dist[v]) {
            if (dist[v] == std::numeric_limits<double>::infinity()) touched.push_back(v);
            dist[v] = nd;
            heap.push({nd, v});
          }
        }
      }
      while (!heap.empty()) heap.pop();
      for (std::uint32_t t : touched) dist[t] = std::numeric_limits<double>::infinity();
      touched.clear();
    }
  });

  TripletBatch batch;
  std::size_t total = 0;
  for (const auto& row : rows) total += row.size();
  batch.origin.reserve(total);
  batch.dst.reserve(total);
  batch.minutes.reserve(total);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [j, t] : rows[i]) batch.push(i, j, t);
  }
  return CostMatrix::from_triplets(mode, max_threshold, n, std::move(batch));
}

}  // namespace gravcat
