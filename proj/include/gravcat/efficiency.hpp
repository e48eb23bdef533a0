#pragma once

#include <array>
#include <string>
#include <vector>

#include "gravcat/access.hpp"
#include "gravcat/impedance.hpp"
#include "gravcat/opportunity.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

/// Default maximum modal speeds in mi/h, indexed by Mode.
inline constexpr std::array<double, kModeCount> kDefaultMaxSpeedMph = {60.0, 4.0,
                                                                       16.0};

/// Frictionless weight for a destination d_km away when travel happens in a
/// straight line at v_max_mph: f(d / v) with the catchment cut at travel
/// time tau (d <= tau * v expressed as d/v <= tau). v_max_mph must be
/// positive and finite (InvalidSpeed); d_km must be >= 0 (InvalidDuration).
double ideal_weight(const ImpedanceParams& params, double d_km,
                    double v_max_mph, double tau);

/// a_hat_i = sum over environment zones j of o_j * ideal_weight(d_ij).
/// Distances are great-circle between centroids, computed on demand behind a
/// latitude-band prefilter; per-origin summation runs in ascending
/// destination-id order. The origin itself contributes o_i (d = 0).
AccessibilityResult ideal_accessibility(const Region& region,
                                        const ZoneSet& zones,
                                        const OpportunityTable& opps,
                                        const std::string& kind,
                                        const ImpedanceParams& params,
                                        double v_max_mph, double tau,
                                        int threads = 0);

/// eta_i = a_i / a_hat_i where the ideal is positive, undefined otherwise;
/// aggregate eta = (sum p a) / (sum p a_hat). Values above 1 are reported
/// and flagged, never clamped: they indicate observed travel beating the
/// assumed straight-line speed bound.
struct EfficiencyResult {
  AccessKey key;
  std::vector<std::string> ids;       // region order, every zone present
  std::vector<double> zonal;          // NaN where undefined
  std::vector<std::uint8_t> defined;  // 1 where a_hat_i > 0
  bool aggregate_defined = false;
  double aggregate = 0.0;
  std::vector<std::string> flagged;   // zones with eta_i > 1
};

/// observed and ideal must carry the same (kind, mode, tau) key and the same
/// zone rows (KeyMismatch otherwise); weights align with the rows and sum to
/// 1 (DimensionMismatch).
EfficiencyResult efficiency(const AccessibilityResult& observed,
                            const AccessibilityResult& ideal,
                            const std::vector<double>& weights);

}  // namespace gravcat
