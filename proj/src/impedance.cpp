#include "gravcat/impedance.hpp"

#include <algorithm>
#include <cmath>

namespace gravcat {

ImpedanceParams ImpedanceParams::gravity(double alpha, double beta,
                                         std::string purpose, Mode mode) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidConfig, "impedance alpha must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidConfig, "impedance beta must be positive and finite");
  }
  return ImpedanceParams{alpha, beta, std::move(purpose), mode, false};
}

ImpedanceParams ImpedanceParams::contour_variant(std::string purpose, Mode mode) {
  return ImpedanceParams{0.0, 0.0, std::move(purpose), mode, true};
}

double eval(const ImpedanceParams& params, double t) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidDuration, "travel time must be finite and >= 0");
  }
  if (params.contour) return 1.0;
  if (t == 0.0) return 1.0;
  return std::exp(-params.alpha * std::pow(t, params.beta));
}

double thresholded_weight(const ImpedanceParams& params, double t, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::InvalidDuration, "threshold tau must be positive and finite");
  }
  if (t < 0.0 || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidDuration, "travel time must be finite and >= 0");
  }
  if (t > tau) return 0.0;
  return eval(params, t);
}

namespace {

// Matching records as (duration, weight), canonically sorted so that the fit
// and the CDF are exactly invariant to input order.
std::vector<std::pair<double, double>> matching_sorted(
    const std::vector<TripRecord>& trips, const std::string& purpose, Mode mode) {
  std::vector<std::pair<double, double>> out;
  for (const TripRecord& r : trips) {
    if (r.mode != mode || r.purpose != purpose) continue;
    if (!(r.duration_min > 0.0) || !std::isfinite(r.duration_min)) {
      throw Error(ErrorCode::InvalidDuration, "trip duration must be positive and finite");
    }
    if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
      throw Error(ErrorCode::InvalidConfig, "trip weight must be positive and finite");
    }
    out.emplace_back(r.duration_min, r.weight);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

FitResult fit(const std::vector<TripRecord>& trips, const std::string& purpose,
              Mode mode, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorCode::InvalidConfig, "bin width must be positive and finite");
  }
  const auto recs = matching_sorted(trips, purpose, mode);
  if (recs.size() < 50) {
    throw Error(ErrorCode::InsufficientData,
                "need at least 50 trips for (" + purpose + ", " +
                    mode_name(mode) + "), have " + std::to_string(recs.size()));
  }

  double total_weight = 0.0;
  for (const auto& [d, w] : recs) total_weight += w;
  const double max_d = recs.back().first;
  const auto n_bins = static_cast<std::size_t>(std::ceil(max_d / bin_width));

  // Survival at bin upper edges: S(edge) = weight of trips with duration >=
  // edge, as a fraction. Records are sorted, so one sweep suffices. Each
  // regression point carries the trip mass that landed in its bin, so
  // sparsely populated tail bins cannot dominate the fit.
  std::vector<double> xs, ys, ws;  // ln(edge), ln(-ln S), bin trip mass
  std::size_t cut = 0;             // records with duration < edge
  double below_weight = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double edge = static_cast<double>(b + 1) * bin_width;
    const double below_previous = below_weight;
    while (cut < recs.size() && recs[cut].first < edge) {
      below_weight += recs[cut].second;
      ++cut;
    }
    const double survival = (total_weight - below_weight) / total_weight;
    if (!(survival > 0.0) || !(survival < 1.0)) continue;  // log-undefined ends
    xs.push_back(std::log(edge));
    ys.push_back(std::log(-std::log(survival)));
    ws.push_back(below_weight - below_previous);
  }

  if (xs.size() < 3) {
    throw Error(ErrorCode::InsufficientVariation,
                "need at least 3 duration bins with interior survival, have " +
                    std::to_string(xs.size()));
  }

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  if (!(sw > 0.0)) {
    throw Error(ErrorCode::InsufficientVariation, "duration bins are degenerate");
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += ws[i] * dx * dx;
    sxy += ws[i] * dx * dy;
    syy += ws[i] * dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InsufficientVariation, "duration bins are degenerate");
  }
  const double beta = sxy / sxx;
  const double ln_alpha = my - beta * mx;
  const double alpha = std::exp(ln_alpha);
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InsufficientVariation,
                "fit did not produce a decreasing impedance (alpha, beta > 0)");
  }
  const double r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;

  FitResult out;
  out.params = ImpedanceParams::gravity(alpha, beta, purpose, mode);
  out.r2 = r2;
  out.n_trips = recs.size();
  out.n_bins = xs.size();
  return out;
}

DurationCdf duration_cdf(const std::vector<TripRecord>& trips,
                         const std::string& purpose, Mode mode,
                         double smoothing_window) {
  if (smoothing_window < 0.0 || !std::isfinite(smoothing_window)) {
    throw Error(ErrorCode::InvalidConfig, "smoothing window must be finite and >= 0");
  }
  const auto recs = matching_sorted(trips, purpose, mode);
  if (recs.empty()) {
    throw Error(ErrorCode::InsufficientData,
                "no trips match (" + std::string(purpose) + ", " + mode_name(mode) + ")");
  }
  double total_weight = 0.0;
  for (const auto& [d, w] : recs) total_weight += w;

  const auto half = static_cast<std::size_t>(smoothing_window / 2.0);
  const auto max_min = static_cast<std::size_t>(std::ceil(recs.back().first));
  const std::size_t grid_len = max_min + half + 1;

  // raw CDF on the 1-minute grid
  std::vector<double> raw(grid_len, 0.0);
  std::size_t cut = 0;
  double below = 0.0;
  for (std::size_t g = 0; g < grid_len; ++g) {
    const auto t = static_cast<double>(g);
    while (cut < recs.size() && recs[cut].first <= t) {
      below += recs[cut].second;
      ++cut;
    }
    raw[g] = below / total_weight;
  }

  DurationCdf out;
  out.minutes.resize(grid_len);
  out.cumulative.resize(grid_len);
  for (std::size_t g = 0; g < grid_len; ++g) {
    out.minutes[g] = static_cast<double>(g);
    if (half == 0) {
      out.cumulative[g] = raw[g];
      continue;
    }
    // centered moving average whose half-width shrinks symmetrically near
    // the ends of the grid. The endpoint windows contain a single raw value,
    // so the smoothed curve stays anchored at exactly 0 and 1, and a
    // symmetric window of a nondecreasing sequence keeps it nondecreasing:
    // stepping right either shifts the window right, adds two values at
    // least as large as everything in it, or drops its two smallest.
    const std::size_t h = std::min({half, g, grid_len - 1 - g});
    double acc = 0.0;
    for (std::size_t pos = g - h; pos <= g + h; ++pos) acc += raw[pos];
    out.cumulative[g] = acc / static_cast<double>(2 * h + 1);
  }
  return out;
}

void ParamsRegistry::insert(const FitResult& result) {
  const auto key = std::make_pair(result.params.purpose,
                                  static_cast<int>(result.params.mode));
  if (!entries_.emplace(key, result).second) {
    throw Error(ErrorCode::InvalidConfig,
                "duplicate impedance parameters for (" + result.params.purpose +
                    ", " + mode_name(result.params.mode) + ")");
  }
}

const FitResult& ParamsRegistry::find(const std::string& purpose, Mode mode) const {
  const auto it = entries_.find(std::make_pair(purpose, static_cast<int>(mode)));
  if (it == entries_.end()) {
    throw Error(ErrorCode::KeyMismatch,
                "no impedance parameters registered for (" + purpose + ", " +
                    mode_name(mode) + ")");
  }
  return it->second;
}

bool ParamsRegistry::contains(const std::string& purpose, Mode mode) const {
  return entries_.count(std::make_pair(purpose, static_cast<int>(mode))) != 0;
}

std::vector<FitResult> ParamsRegistry::entries() const {
  std::vector<FitResult> out;
  out.reserve(entries_.size());
  for (const auto& [key, value] : entries_) out.push_back(value);
  return out;
}

}  // namespace gravcat
