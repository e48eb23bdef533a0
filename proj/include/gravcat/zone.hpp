#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gravcat/errors.hpp"
#include "gravcat/geo.hpp"

namespace gravcat {

enum class Mode : std::uint8_t { drive = 0, walk = 1, bike = 2 };
inline constexpr int kModeCount = 3;

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);  // InvalidConfig on unknown name

struct Zone {
  std::string id;
  double centroid_lat = 0.0;
  double centroid_lon = 0.0;
  double population = 0.0;  // nonnegative
  double workers = 0.0;     // nonnegative

  LatLon centroid() const { return {centroid_lat, centroid_lon}; }
};

/// The environment set: every zone the analysis knows about. Zones are held
/// in ascending-id order and addressed by their dense index in that order,
/// which is what makes "ascending destination id" and "ascending index"
/// the same traversal everywhere downstream. Immutable once built.
class ZoneSet {
public:
  ZoneSet() = default;
  explicit ZoneSet(std::vector<Zone> zones);  // sorts by id, validates

  std::size_t size() const noexcept { return zones_.size(); }
  bool empty() const noexcept { return zones_.empty(); }
  const Zone& at(std::uint32_t index) const { return zones_.at(index); }
  std::span<const Zone> zones() const noexcept { return zones_; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::uint32_t index_of(const std::string& id) const;  // UnknownZone if absent

private:
  std::vector<Zone> zones_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// An ordered subset of the environment (the target region S). Keeps the
/// caller's ordering; weight vectors and result rows align with it.
class Region {
public:
  Region() = default;
  Region(const ZoneSet& zones, std::vector<std::string> ids);  // validates membership, uniqueness

  /// Region covering the whole environment, in ascending-id order.
  static Region whole(const ZoneSet& zones);

  std::size_t size() const noexcept { return indices_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::span<const std::string> ids() const noexcept { return ids_; }

private:
  std::vector<std::string> ids_;
  std::vector<std::uint32_t> indices_;
};

enum class WeightBasis : std::uint8_t { population, workers };

const char* weight_basis_name(WeightBasis basis);
WeightBasis weight_basis_from_name(const std::string& name);

/// p_i = n_i / sum(n_j) over the region, n taken from the chosen basis.
/// Throws EmptyPopulation when the basis total is zero.
std::vector<double> population_weights(const ZoneSet& zones, const Region& region,
                                       WeightBasis basis);

}  // namespace gravcat
