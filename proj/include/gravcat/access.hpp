#pragma once

#include <string>
#include <vector>

#include "gravcat/cost_matrix.hpp"
#include "gravcat/impedance.hpp"
#include "gravcat/opportunity.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

/// What a block of accessibility values was computed for.
struct AccessKey {
  std::string kind;
  Mode mode = Mode::drive;
  double tau = 0.0;

  bool operator==(const AccessKey& other) const {
    return kind == other.kind && mode == other.mode && tau == other.tau;
  }
};

/// Per-zone accessibility for one (kind, mode, tau). `values[k]` belongs to
/// `ids[k]`; rows follow the queried region's order and every region zone is
/// present (zones with an empty catchment report their intrazonal
/// contribution, possibly 0).
struct AccessibilityResult {
  AccessKey key;
  std::vector<std::string> ids;
  std::vector<double> values;
};

/// Intrazonal travel-time policy: by default a zone reaches its own
/// opportunities at the matrix's stored self time (0 when the matrix has
/// none). An override vector, indexed by environment zone, wins over both.
struct IntrazonalPolicy {
  const std::vector<double>* override_minutes = nullptr;
};

/// a_i = sum over stored destinations j with t_ij <= tau of
/// o_j * f(t_ij), plus the intrazonal term. Stored destinations are summed
/// in ascending destination-id order and the intrazonal term is added last,
/// so results are bit-identical at any thread count.
/// Errors: tau > matrix prune bound -> ThresholdExceedsPrune; params/matrix
/// mode disagreement -> ModeMismatch; unregistered kind -> UnknownKind;
/// matrix/opportunity zone-count disagreement -> DimensionMismatch.
AccessibilityResult zonal_accessibility(const Region& region,
                                        const CostMatrix& matrix,
                                        const OpportunityTable& opps,
                                        const std::string& kind,
                                        const ImpedanceParams& params,
                                        double tau,
                                        const IntrazonalPolicy& intrazonal = {},
                                        int threads = 0);

/// chi = sum of weights[k] * result.values[k]; weights must align with the
/// result rows and sum to 1 (DimensionMismatch otherwise).
double aggregate(const AccessibilityResult& result,
                 const std::vector<double>& weights);

/// One result per requested tau, in the caller's order.
std::vector<AccessibilityResult> threshold_sweep(
    const Region& region, const CostMatrix& matrix, const OpportunityTable& opps,
    const std::string& kind, const ImpedanceParams& params,
    const std::vector<double>& taus, const IntrazonalPolicy& intrazonal = {},
    int threads = 0);

/// Percent by which the constant-weight (contour) count overstates the
/// decayed measure: 100 * (a_contour - a_gravity) / a_gravity per zone.
/// Zones whose gravity accessibility is 0 are listed separately as
/// undefined, never reported as numbers.
struct OverestimationResult {
  AccessKey key;
  std::vector<std::string> ids;      // zones with gravity > 0, region order
  std::vector<double> percent;       // >= 0, aligned with ids
  std::vector<std::string> undefined_ids;
};
OverestimationResult contour_overestimation(
    const Region& region, const CostMatrix& matrix, const OpportunityTable& opps,
    const std::string& kind, const ImpedanceParams& params, double tau,
    const IntrazonalPolicy& intrazonal = {}, int threads = 0);

}  // namespace gravcat
