#include "gravcat/zone.hpp"

#include <algorithm>
#include <cmath>

namespace gravcat {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::drive: return "drive";
    case Mode::walk:  return "walk";
    case Mode::bike:  return "bike";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  if (name == "drive") return Mode::drive;
  if (name == "walk") return Mode::walk;
  if (name == "bike") return Mode::bike;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + name + "' (expected drive, walk, or bike)");
}

ZoneSet::ZoneSet(std::vector<Zone> zones) : zones_(std::move(zones)) {
  std::sort(zones_.begin(), zones_.end(),
            [](const Zone& a, const Zone& b) { return a.id < b.id; });
  index_.reserve(zones_.size());
  for (std::uint32_t i = 0; i < zones_.size(); ++i) {
    const Zone& z = zones_[i];
    if (!coordinates_valid(z.centroid_lat, z.centroid_lon)) {
      throw Error(ErrorCode::InvalidCoordinate, "zone '" + z.id + "' has out-of-range centroid");
    }
    if (!(z.population >= 0.0) || !(z.workers >= 0.0) ||
        !std::isfinite(z.population) || !std::isfinite(z.workers)) {
      throw Error(ErrorCode::NegativeCount, "zone '" + z.id + "' has negative or non-finite counts");
    }
    if (!index_.emplace(z.id, i).second) {
      throw Error(ErrorCode::DuplicateZone, "duplicate zone id '" + z.id + "'");
    }
  }
}

std::uint32_t ZoneSet::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownZone, "unknown zone id '" + id + "'");
  }
  return it->second;
}

Region::Region(const ZoneSet& zones, std::vector<std::string> ids) : ids_(std::move(ids)) {
  indices_.reserve(ids_.size());
  std::unordered_map<std::string, bool> seen;
  seen.reserve(ids_.size());
  for (const std::string& id : ids_) {
    if (!seen.emplace(id, true).second) {
      throw Error(ErrorCode::DuplicateZone, "zone '" + id + "' listed twice in region");
    }
    indices_.push_back(zones.index_of(id));
  }
}

Region Region::whole(const ZoneSet& zones) {
  Region r;
  r.ids_.reserve(zones.size());
  r.indices_.reserve(zones.size());
  for (std::uint32_t i = 0; i < zones.size(); ++i) {
    r.ids_.push_back(zones.at(i).id);
    r.indices_.push_back(i);
  }
  return r;
}

const char* weight_basis_name(WeightBasis basis) {
  return basis == WeightBasis::population ? "population" : "workers";
}

WeightBasis weight_basis_from_name(const std::string& name) {
  if (name == "population") return WeightBasis::population;
  if (name == "workers") return WeightBasis::workers;
  throw Error(ErrorCode::InvalidConfig, "unknown weight basis '" + name + "' (expected population or workers)");
}

std::vector<double> population_weights(const ZoneSet& zones, const Region& region,
                                       WeightBasis basis) {
  std::vector<double> counts(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) {
    const Zone& z = zones.at(region.indices()[k]);
    counts[k] = basis == WeightBasis::population ? z.population : z.workers;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::EmptyPopulation, "region has zero total " +
                std::string(weight_basis_name(basis)));
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace gravcat
