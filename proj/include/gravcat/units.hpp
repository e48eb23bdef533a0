#pragma once

namespace gravcat {

// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

inline constexpr double kKmPerMile = 1.609344;

/// Speeds are accepted in mi/h at every interface and used internally in
/// km/min (travel times are minutes, distances kilometers).
inline constexpr double mph_to_km_per_min(double mph) {
  return mph * kKmPerMile / 60.0;
}

}  // namespace gravcat
