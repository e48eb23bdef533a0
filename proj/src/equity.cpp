#include "gravcat/equity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gravcat/kernels.hpp"
#include "gravcat/parallel.hpp"

namespace gravcat {

SediFactors::SediFactors(std::size_t n_zones) : complete(n_zones, 0) {
  for (auto& column : values) column.assign(n_zones, 0.0);
}

void SediFactors::set_zone(std::uint32_t zone,
                           const std::array<double, kSediFactorCount>& row) {
  for (std::size_t f = 0; f < kSediFactorCount; ++f) {
    if (!std::isfinite(row[f])) {
      throw Error(ErrorCode::UnparsableNumber,
                  std::string("factor ") + kSediFactorNames[f] + " must be finite");
    }
    values[f].at(zone) = row[f];
  }
  complete.at(zone) = 1;
}

namespace {

// Disadvantage-aligned fractional ranks (rank-1)/(N-1), ties averaged.
std::vector<double> fractional_ranks(const std::vector<double>& raw,
                                     bool larger_is_worse) {
  const std::size_t n = raw.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return raw[a] < raw[b];
  });
  std::vector<double> rank(n, 0.0);
  std::size_t k = 0;
  while (k < n) {
    std::size_t j = k;
    while (j + 1 < n && raw[order[j + 1]] == raw[order[k]]) ++j;
    // average 1-based rank over the tie group [k, j]
    const double avg = (static_cast<double>(k) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t g = k; g <= j; ++g) rank[order[g]] = avg;
    k = j + 1;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (rank[i] - 1.0) / (static_cast<double>(n) - 1.0);
    out[i] = larger_is_worse ? r : 1.0 - r;
  }
  return out;
}

}  // namespace

SediTable sedi(const SediFactors& factors, const ZoneSet& zones,
               const Region& region, const SediConfig& config) {
  if (factors.zone_count() != zones.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "factor table covers " + std::to_string(factors.zone_count()) +
                    " zones, environment has " + std::to_string(zones.size()));
  }
  double weight_total = 0.0;
  for (double w : config.factor_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidConfig, "factor weights must be finite and >= 0");
    }
    weight_total += w;
  }
  if (!(weight_total > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "factor weights must not all be zero");
  }

  SediTable out;
  std::vector<std::uint32_t> included;  // environment indices, region order
  for (std::size_t k = 0; k < region.size(); ++k) {
    const std::uint32_t i = region.indices()[k];
    if (factors.complete[i]) {
      included.push_back(i);
      out.ids.push_back(region.ids()[k]);
    } else {
      out.excluded.push_back(region.ids()[k]);
    }
  }
  if (included.size() < 2) {
    throw Error(ErrorCode::InsufficientData,
                "need at least 2 zones with complete factors, have " +
                    std::to_string(included.size()));
  }

  out.index.assign(included.size(), 0.0);
  std::vector<double> column(included.size());
  for (std::size_t f = 0; f < kSediFactorCount; ++f) {
    for (std::size_t k = 0; k < included.size(); ++k) {
      column[k] = factors.values[f][included[k]];
    }
    const std::vector<double> ranks =
        fractional_ranks(column, config.larger_is_worse[f]);
    for (std::size_t k = 0; k < included.size(); ++k) {
      out.index[k] += config.factor_weights[f] * ranks[k];
    }
  }
  for (double& v : out.index) v /= weight_total;
  return out;
}

ImprovementPotential improvement_potential(const Region& region,
                                           const CostMatrix& matrix,
                                           const ImpedanceParams& params,
                                           double tau,
                                           const std::vector<double>& weights,
                                           std::string weighting_label,
                                           int threads) {
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
  if (weights.size() != region.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "weight vector has " + std::to_string(weights.size()) +
                    " entries for a region of " + std::to_string(region.size()));
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9) {
    throw Error(ErrorCode::DimensionMismatch, "weights must sum to 1");
  }

  // Transposed square submatrix: per destination, the region origins that
  // reach it. Each destination's contraction is then an independent dot
  // product, which keeps any thread count bit-identical.
  const CostMatrix::Transposed sub = matrix.transpose_submatrix(region);

  ImprovementPotential out;
  out.mode = matrix.mode();
  out.tau = tau;
  out.weighting = std::move(weighting_label);
  out.ids.assign(region.ids().begin(), region.ids().end());
  out.gradient.resize(region.size());
  out.rank.resize(region.size());

  const KernelTable& kern = active_kernels();
  const double* p = weights.data();
  const auto region_idx = region.indices();
  parallel_for(region.size(), resolve_threads(threads),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   const double* ts = sub.minutes.data() + sub.col_offsets[k];
                   const std::uint32_t* os = sub.origin_pos.data() + sub.col_offsets[k];
                   const auto len = static_cast<std::size_t>(sub.col_offsets[k + 1] -
                                                             sub.col_offsets[k]);
                   double g;
                   if (params.contour) {
                     g = kern.contour_dot(ts, os, p, len, tau);
                   } else {
                     g = kern.decay_dot(ts, os, p, len, params.alpha, params.beta, tau);
                   }
                   // the zone's own origin contributes through its self time
                   const double tii = matrix.self_minutes(region_idx[k]);
                   g += p[k] * thresholded_weight(params, tii, tau);
                   out.gradient[k] = g;
                 }
               });

  // rank 1 = highest gradient; ties broken by ascending zone id
  std::vector<std::uint32_t> order(region.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (out.gradient[a] != out.gradient[b]) return out.gradient[a] > out.gradient[b];
    return out.ids[a] < out.ids[b];
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    out.rank[order[r]] = static_cast<std::uint32_t>(r + 1);
  }
  return out;
}

std::vector<double> sedi_weighted_population(const ZoneSet& zones,
                                             const SediTable& sedi,
                                             const Region& region,
                                             double lambda,
                                             WeightBasis basis) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidConfig, "lambda must be finite and >= 0");
  }
  std::vector<double> index_by_id_order;  // aligned with region rows
  index_by_id_order.assign(region.size(), std::numeric_limits<double>::quiet_NaN());
  {
    // sedi rows are a subsequence of the region rows
    std::size_t s = 0;
    for (std::size_t k = 0; k < region.size() && s < sedi.ids.size(); ++k) {
      if (region.ids()[k] == sedi.ids[s]) {
        index_by_id_order[k] = sedi.index[s];
        ++s;
      }
    }
    if (s != sedi.ids.size()) {
      throw Error(ErrorCode::MissingIndex,
                  "disadvantage index does not align with the region");
    }
  }

  std::vector<double> raw(region.size());
  double total = 0.0;
  for (std::size_t k = 0; k < region.size(); ++k) {
    const Zone& z = zones.at(region.indices()[k]);
    const double n = (basis == WeightBasis::population) ? z.population : z.workers;
    if (n > 0.0 && std::isnan(index_by_id_order[k])) {
      throw Error(ErrorCode::MissingIndex,
                  "no disadvantage index for populated zone '" + region.ids()[k] + "'");
    }
    const double s = std::isnan(index_by_id_order[k]) ? 0.0 : index_by_id_order[k];
    raw[k] = n * (1.0 + lambda * s);
    total += raw[k];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::EmptyPopulation,
                std::string("total ") + weight_basis_name(basis) +
                    " over the region is zero");
  }
  for (double& v : raw) v /= total;
  return raw;
}

RankShift rank_shift(const ImprovementPotential& unweighted,
                     const ImprovementPotential& weighted) {
  if (unweighted.ids != weighted.ids || unweighted.mode != weighted.mode ||
      unweighted.tau != weighted.tau) {
    throw Error(ErrorCode::KeyMismatch,
                "rank shift needs two potentials over the same region, mode, and tau");
  }
  RankShift out;
  out.ids = unweighted.ids;
  out.shift.resize(unweighted.ids.size());
  for (std::size_t k = 0; k < out.ids.size(); ++k) {
    out.shift[k] = static_cast<std::int64_t>(unweighted.rank[k]) -
                   static_cast<std::int64_t>(weighted.rank[k]);
  }
  return out;
}

}  // namespace gravcat
