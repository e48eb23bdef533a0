#include "gravcat/geo.hpp"

#include <cmath>

#include "gravcat/units.hpp"

namespace gravcat {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

bool coordinates_valid(double lat, double lon) noexcept {
  return std::isfinite(lat) && std::isfinite(lon) &&
         lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

double haversine_km(const LatLon& a, const LatLon& b) {
  if (!coordinates_valid(a.lat, a.lon) || !coordinates_valid(b.lat, b.lon)) {
    throw Error(ErrorCode::InvalidCoordinate, "latitude must be in [-90,90] and longitude in [-180,180]");
  }
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  // |deltas| keep the formula bitwise symmetric under argument swap
  const double dphi = std::fabs(phi2 - phi1);
  const double dlam = std::fabs((b.lon - a.lon) * kDegToRad);
  const double sp = std::sin(dphi * 0.5);
  const double sl = std::sin(dlam * 0.5);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  const double c = 2.0 * std::asin(std::sqrt(std::fmin(1.0, h)));
  return kEarthRadiusKm * c;
}

}  // namespace gravcat
