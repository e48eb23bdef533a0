#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gravcat/cost_matrix.hpp"
#include "gravcat/impedance.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

inline constexpr std::size_t kSediFactorCount = 6;

/// Column order of the disadvantage factors. Every default direction is
/// "larger raw value means more disadvantage" (note the vehicle column is
/// the share of households WITHOUT a vehicle).
inline constexpr std::array<const char*, kSediFactorCount> kSediFactorNames = {
    "poverty",      "minority",     "unemployment",
    "low_education", "zero_vehicle", "single_parent"};

/// Raw factor columns over the environment. A zone participates only when
/// all six factors were provided for it.
struct SediFactors {
  std::array<std::vector<double>, kSediFactorCount> values;
  std::vector<std::uint8_t> complete;

  explicit SediFactors(std::size_t n_zones = 0);
  std::size_t zone_count() const noexcept { return complete.size(); }
  void set_zone(std::uint32_t zone, const std::array<double, kSediFactorCount>& row);
};

struct SediConfig {
  std::array<bool, kSediFactorCount> larger_is_worse = {true, true, true,
                                                        true, true, true};
  std::array<double, kSediFactorCount> factor_weights = {1, 1, 1, 1, 1, 1};
};

/// Composite disadvantage index per region zone with complete factors:
/// each factor becomes a disadvantage-aligned fractional rank
/// (rank - 1) / (N - 1) with ties averaged, and the composite is the
/// (weighted) mean of the six ranks — so any strictly monotone transform of
/// a raw factor leaves the table unchanged. Region-relative by construction.
struct SediTable {
  std::vector<std::string> ids;       // region order, complete zones only
  std::vector<double> index;          // in [0, 1], aligned with ids
  std::vector<std::string> excluded;  // region zones with incomplete factors
};
/// Requires >= 2 complete zones in the region (InsufficientData).
SediTable sedi(const SediFactors& factors, const ZoneSet& zones,
               const Region& region, const SediConfig& config = {});

/// d(chi_S)/d(o_i) for zones i in S: how much one extra opportunity in zone
/// i would raise the aggregate accessibility of S. Because chi = p' W o,
/// the gradient contracts the transposed square submatrix:
/// gradient_i = sum over region origins j with t_ji <= tau of
/// p_j * f(t_ji), including each origin's intrazonal term. Every value lies
/// in [0, 1]. Ranks: 1 = highest gradient, ties broken by ascending zone id.
struct ImprovementPotential {
  Mode mode = Mode::drive;
  double tau = 0.0;
  std::string weighting;  // label for the weight vector used, e.g. "unweighted"
  std::vector<std::string> ids;      // region order
  std::vector<double> gradient;
  std::vector<std::uint32_t> rank;
};
ImprovementPotential improvement_potential(const Region& region,
                                           const CostMatrix& matrix,
                                           const ImpedanceParams& params,
                                           double tau,
                                           const std::vector<double>& weights,
                                           std::string weighting_label,
                                           int threads = 0);

/// p~_i proportional to n_i * (1 + lambda * SEDI_i), renormalized to sum 1.
/// lambda = 0 reproduces population_weights bit for bit. A zone with
/// positive basis count but no SEDI value is an error (MissingIndex);
/// zero-count zones may lack SEDI (their weight is 0 regardless).
std::vector<double> sedi_weighted_population(const ZoneSet& zones,
                                             const SediTable& sedi,
                                             const Region& region,
                                             double lambda,
                                             WeightBasis basis = WeightBasis::population);

/// rank_unweighted - rank_weighted per zone; positive means SEDI weighting
/// moved the zone up the priority list. Shifts sum to zero.
struct RankShift {
  std::vector<std::string> ids;
  std::vector<std::int64_t> shift;
};
RankShift rank_shift(const ImprovementPotential& unweighted,
                     const ImprovementPotential& weighted);

}  // namespace gravcat
