#pragma once

#include "gravcat/errors.hpp"

namespace gravcat {

struct LatLon {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

bool coordinates_valid(double lat, double lon) noexcept;

/// Great-circle distance in kilometers on a sphere of radius kEarthRadiusKm.
/// Exactly symmetric in its arguments. Throws InvalidCoordinate for
/// out-of-range or non-finite inputs.
double haversine_km(const LatLon& a, const LatLon& b);

}  // namespace gravcat
