#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gravcat/errors.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

/// Travel-likelihood weight as a function of travel time in minutes:
/// f(t) = exp(-alpha * t^beta), or the constant f == 1 contour variant
/// used for plain cumulative-opportunity counting.
struct ImpedanceParams {
  double alpha = 0.0;  // > 0, units min^-beta (unused for contour)
  double beta = 0.0;   // > 0, dimensionless   (unused for contour)
  std::string purpose;
  Mode mode = Mode::drive;
  bool contour = false;

  /// Validates alpha > 0 and beta > 0 (both finite); InvalidConfig otherwise.
  static ImpedanceParams gravity(double alpha, double beta, std::string purpose,
                                 Mode mode);
  /// The f == 1 variant; alpha/beta are ignored downstream.
  static ImpedanceParams contour_variant(std::string purpose, Mode mode);
};

/// f(t) for t >= 0; f(0) == 1 exactly, strictly decreasing for gravity
/// params. Throws InvalidDuration for negative or non-finite t.
double eval(const ImpedanceParams& params, double t);

/// f(t) if t <= tau (inclusive), else 0. tau must be positive and finite.
double thresholded_weight(const ImpedanceParams& params, double t, double tau);

/// One observed trip; the empirical material the fit consumes.
struct TripRecord {
  Mode mode = Mode::drive;
  std::string purpose;
  double duration_min = 0.0;  // > 0, finite
  double weight = 1.0;        // > 0, finite; optional sampling weight
};

struct FitResult {
  ImpedanceParams params;
  double r2 = 0.0;
  std::size_t n_trips = 0;
  std::size_t n_bins = 0;  // bins that entered the regression
};

inline constexpr double kDefaultBinWidthMin = 5.0;

/// Fits (alpha, beta) for the trips matching (purpose, mode) by least
/// squares on the survival double-log line
///   ln(-ln S(t_k)) = ln(alpha) + beta * ln(t_k),
/// where S(t) is the (weight-)empirical fraction of trips with duration >= t
/// and t_k are duration-bin upper edges. Each point is weighted by the trip
/// mass inside its bin, so nearly empty tail bins cannot dominate. Bins
/// whose survival is 0 or 1 carry no information in log space and are
/// dropped.
/// Requires >= 50 matching trips (InsufficientData) and >= 3 usable bins
/// (InsufficientVariation). Trip order never affects the result: records are
/// canonically sorted before any accumulation.
FitResult fit(const std::vector<TripRecord>& trips, const std::string& purpose,
              Mode mode, double bin_width = kDefaultBinWidthMin);

/// Smoothed cumulative distribution of matching trip durations on a 1-minute
/// grid; `cumulative[i]` is the smoothed fraction of trips with duration <=
/// minutes[i]. Smoothing is a centered moving average over
/// `smoothing_window` minutes (0 = raw CDF); it preserves monotonicity and
/// the 0 and 1 endpoints. Requires >= 1 matching trip (InsufficientData).
struct DurationCdf {
  std::vector<double> minutes;
  std::vector<double> cumulative;
};
DurationCdf duration_cdf(const std::vector<TripRecord>& trips,
                         const std::string& purpose, Mode mode,
                         double smoothing_window = 5.0);

/// Fitted parameters keyed by (purpose, mode). Lookup of an absent key is an
/// error, never a silent default.
class ParamsRegistry {
public:
  void insert(const FitResult& result);  // duplicate key -> InvalidConfig
  const FitResult& find(const std::string& purpose, Mode mode) const;  // KeyMismatch
  bool contains(const std::string& purpose, Mode mode) const;

  /// Entries in deterministic (purpose, mode) order.
  std::vector<FitResult> entries() const;
  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::map<std::pair<std::string, int>, FitResult> entries_;
};

}  // namespace gravcat
