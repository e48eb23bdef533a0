#include "gravcat/access.hpp"

#include <cmath>

#include "gravcat/kernels.hpp"
#include "gravcat/parallel.hpp"

namespace gravcat {
namespace {

void check_query(const CostMatrix& matrix, const OpportunityTable& opps,
                 const ImpedanceParams& params, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::InvalidDuration, "threshold tau must be positive and finite");
  }
  if (tau > matrix.max_threshold()) {
    throw Error(ErrorCode::ThresholdExceedsPrune,
                "tau " + std::to_string(tau) + " exceeds the matrix prune bound " +
                    std::to_string(matrix.max_threshold()));
  }
  if (params.mode != matrix.mode()) {
    throw Error(ErrorCode::ModeMismatch,
                std::string("impedance parameters are for mode ") +
                    mode_name(params.mode) + " but the matrix holds " +
                    mode_name(matrix.mode()));
  }
  if (opps.zone_count() != matrix.zone_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "opportunity table covers " + std::to_string(opps.zone_count()) +
                    " zones, matrix covers " + std::to_string(matrix.zone_count()));
  }
}

double self_time(const CostMatrix& matrix, const IntrazonalPolicy& policy,
                 std::uint32_t zone) {
  if (policy.override_minutes != nullptr) return (*policy.override_minutes)[zone];
  return matrix.self_minutes(zone);
}

}  // namespace

AccessibilityResult zonal_accessibility(const Region& region,
                                        const CostMatrix& matrix,
                                        const OpportunityTable& opps,
                                        const std::string& kind,
                                        const ImpedanceParams& params,
                                        double tau,
                                        const IntrazonalPolicy& intrazonal,
                                        int threads) {
  check_query(matrix, opps, params, tau);
  const std::uint32_t kind_idx = opps.kind_index(kind);
  const double* o = opps.counts(kind_idx).data();
  if (intrazonal.override_minutes != nullptr &&
      intrazonal.override_minutes->size() != matrix.zone_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "intrazonal override must cover every environment zone");
  }

  AccessibilityResult out;
  out.key = {kind, matrix.mode(), tau};
  out.ids.assign(region.ids().begin(), region.ids().end());
  out.values.resize(region.size());

  const KernelTable& kern = active_kernels();
  const auto region_idx = region.indices();
  parallel_for(region.size(), resolve_threads(threads),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   const std::uint32_t i = region_idx[k];
                   const auto ts = matrix.row_minutes(i);
                   const auto ds = matrix.row_dst(i);
                   double a;
                   if (params.contour) {
                     a = kern.contour_dot(ts.data(), ds.data(), o, ts.size(), tau);
                   } else {
                     a = kern.decay_dot(ts.data(), ds.data(), o, ts.size(),
                                        params.alpha, params.beta, tau);
                   }
                   const double tii = self_time(matrix, intrazonal, i);
                   a += o[i] * thresholded_weight(params, tii, tau);
                   out.values[k] = a;
                 }
               });
  return out;
}

double aggregate(const AccessibilityResult& result,
                 const std::vector<double>& weights) {
  if (weights.size() != result.values.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "weight vector has " + std::to_string(weights.size()) +
                    " entries for " + std::to_string(result.values.size()) +
                    " result rows");
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9) {
    throw Error(ErrorCode::DimensionMismatch, "weights must sum to 1");
  }
  double chi = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    chi += weights[k] * result.values[k];
  }
  return chi;
}

std::vector<AccessibilityResult> threshold_sweep(
    const Region& region, const CostMatrix& matrix, const OpportunityTable& opps,
    const std::string& kind, const ImpedanceParams& params,
    const std::vector<double>& taus, const IntrazonalPolicy& intrazonal,
    int threads) {
  std::vector<AccessibilityResult> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    out.push_back(zonal_accessibility(region, matrix, opps, kind, params, tau,
                                      intrazonal, threads));
  }
  return out;
}

OverestimationResult contour_overestimation(
    const Region& region, const CostMatrix& matrix, const OpportunityTable& opps,
    const std::string& kind, const ImpedanceParams& params, double tau,
    const IntrazonalPolicy& intrazonal, int threads) {
  if (params.contour) {
    throw Error(ErrorCode::InvalidConfig,
                "overestimation needs decaying impedance parameters to compare against");
  }
  const AccessibilityResult gravity = zonal_accessibility(
      region, matrix, opps, kind, params, tau, intrazonal, threads);
  const AccessibilityResult contour = zonal_accessibility(
      region, matrix, opps, kind,
      ImpedanceParams::contour_variant(params.purpose, params.mode), tau,
      intrazonal, threads);

  OverestimationResult out;
  out.key = gravity.key;
  for (std::size_t k = 0; k < gravity.values.size(); ++k) {
    if (gravity.values[k] > 0.0) {
      out.ids.push_back(gravity.ids[k]);
      out.percent.push_back(100.0 * (contour.values[k] - gravity.values[k]) /
                            gravity.values[k]);
    } else {
      out.undefined_ids.push_back(gravity.ids[k]);
    }
  }
  return out;
}

}  // namespace gravcat
