#include "gravcat/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gravcat/geo.hpp"
#include "gravcat/kernels.hpp"
#include "gravcat/parallel.hpp"
#include "gravcat/units.hpp"

namespace gravcat {
namespace {

// Kilometers per degree of latitude (and of longitude at the equator).
constexpr double kKmPerDegree = kEarthRadiusKm * 3.14159265358979323846 / 180.0;

double checked_speed_km_per_min(double v_max_mph) {
  if (!(v_max_mph > 0.0) || !std::isfinite(v_max_mph)) {
    throw Error(ErrorCode::InvalidSpeed, "maximum modal speed must be positive and finite");
  }
  return mph_to_km_per_min(v_max_mph);
}

}  // namespace

double ideal_weight(const ImpedanceParams& params, double d_km,
                    double v_max_mph, double tau) {
  const double v = checked_speed_km_per_min(v_max_mph);
  if (d_km < 0.0 || !std::isfinite(d_km)) {
    throw Error(ErrorCode::InvalidDuration, "distance must be finite and >= 0");
  }
  return thresholded_weight(params, d_km / v, tau);
}

AccessibilityResult ideal_accessibility(const Region& region,
                                        const ZoneSet& zones,
                                        const OpportunityTable& opps,
                                        const std::string& kind,
                                        const ImpedanceParams& params,
                                        double v_max_mph, double tau,
                                        int threads) {
  const double v = checked_speed_km_per_min(v_max_mph);
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::InvalidDuration, "threshold tau must be positive and finite");
  }
  if (zones.empty()) {
    throw Error(ErrorCode::MissingGeometry, "no zone centroids available");
  }
  if (opps.zone_count() != zones.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "opportunity table covers " + std::to_string(opps.zone_count()) +
                    " zones, environment has " + std::to_string(zones.size()));
  }
  const std::uint32_t kind_idx = opps.kind_index(kind);
  const double* o = opps.counts(kind_idx).data();

  // latitude-band prefilter: |delta lat| can never exceed the angular reach
  std::vector<std::pair<double, std::uint32_t>> by_lat(zones.size());
  for (std::uint32_t j = 0; j < zones.size(); ++j) {
    by_lat[j] = {zones.at(j).centroid_lat, j};
  }
  std::sort(by_lat.begin(), by_lat.end());
  const double radius_km = tau * v;
  const double band_deg = radius_km / kKmPerDegree * (1.0 + 1e-12) + 1e-12;

  AccessibilityResult out;
  out.key = {kind, params.mode, tau};
  out.ids.assign(region.ids().begin(), region.ids().end());
  out.values.resize(region.size());

  const KernelTable& kern = active_kernels();
  const auto region_idx = region.indices();
  parallel_for(region.size(), resolve_threads(threads),
               [&](std::size_t begin, std::size_t end) {
                 std::vector<std::uint32_t> cand;
                 std::vector<double> t_hat;
                 for (std::size_t k = begin; k < end; ++k) {
                   const std::uint32_t i = region_idx[k];
                   const LatLon from = zones.at(i).centroid();
                   const auto lo = std::lower_bound(
                       by_lat.begin(), by_lat.end(),
                       std::make_pair(from.lat - band_deg, std::uint32_t{0}));
                   const auto hi = std::upper_bound(
                       lo, by_lat.end(),
                       std::make_pair(from.lat + band_deg,
                                      std::numeric_limits<std::uint32_t>::max()));
                   cand.clear();
                   for (auto it = lo; it != hi; ++it) cand.push_back(it->second);
                   std::sort(cand.begin(), cand.end());  // ascending destination id
                   t_hat.clear();
                   t_hat.reserve(cand.size());
                   for (std::uint32_t j : cand) {
                     t_hat.push_back(haversine_km(from, zones.at(j).centroid()) / v);
                   }
                   if (params.contour) {
                     out.values[k] = kern.contour_dot(t_hat.data(), cand.data(), o,
                                                      cand.size(), tau);
                   } else {
                     out.values[k] =
                         kern.decay_dot(t_hat.data(), cand.data(), o, cand.size(),
                                        params.alpha, params.beta, tau);
                   }
                 }
               });
  return out;
}

EfficiencyResult efficiency(const AccessibilityResult& observed,
                            const AccessibilityResult& ideal,
                            const std::vector<double>& weights) {
  if (!(observed.key == ideal.key)) {
    throw Error(ErrorCode::KeyMismatch,
                "observed and ideal accessibility were computed for different "
                "(kind, mode, tau) keys");
  }
  if (observed.ids != ideal.ids) {
    throw Error(ErrorCode::KeyMismatch,
                "observed and ideal accessibility cover different zone rows");
  }
  if (weights.size() != observed.values.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "weight vector has " + std::to_string(weights.size()) +
                    " entries for " + std::to_string(observed.values.size()) +
                    " result rows");
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9) {
    throw Error(ErrorCode::DimensionMismatch, "weights must sum to 1");
  }

  EfficiencyResult out;
  out.key = observed.key;
  out.ids = observed.ids;
  out.zonal.resize(observed.values.size());
  out.defined.resize(observed.values.size());
  double chi = 0.0, chi_hat = 0.0;
  for (std::size_t k = 0; k < observed.values.size(); ++k) {
    const double a = observed.values[k];
    const double a_hat = ideal.values[k];
    chi += weights[k] * a;
    chi_hat += weights[k] * a_hat;
    if (a_hat > 0.0) {
      out.zonal[k] = a / a_hat;
      out.defined[k] = 1;
      if (out.zonal[k] > 1.0) out.flagged.push_back(observed.ids[k]);
    } else {
      out.zonal[k] = std::numeric_limits<double>::quiet_NaN();
      out.defined[k] = 0;
    }
  }
  if (chi_hat > 0.0) {
    out.aggregate = chi / chi_hat;
    out.aggregate_defined = true;
  }
  return out;
}

}  // namespace gravcat
