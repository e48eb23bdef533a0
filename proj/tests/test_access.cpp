#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>

#include "gravcat/access.hpp"
#include "gravcat/rng.hpp"

using namespace gravcat;

namespace {

const ImpedanceParams kBase = ImpedanceParams::gravity(0.008, 1.467, "work",
                                                       Mode::drive);

/// A tiny fully specified instance: zone ids "Z0".."Z{n-1}", one kind.
struct SmallInstance {
  ZoneSet zones;
  OpportunityTable opps;
  CostMatrix matrix;
  std::vector<std::vector<double>> dense;  // dense[i][j], inf = absent
};

SmallInstance random_instance(SplitMix64& rng, std::size_t n, double bound) {
  std::vector<Zone> zs;
  for (std::size_t i = 0; i < n; ++i) {
    zs.push_back({"Z" + std::to_string(i), 41.0 + 0.01 * static_cast<double>(i),
                  -87.0, 100.0 + static_cast<double>(i), 10.0});
  }
  SmallInstance inst{ZoneSet(std::move(zs)), OpportunityTable(n), CostMatrix{}, {}};
  for (std::size_t j = 0; j < n; ++j) {
    inst.opps.set(static_cast<std::uint32_t>(j), 0, rng.uniform01() * 500.0);
  }
  const double inf = std::numeric_limits<double>::infinity();
  inst.dense.assign(n, std::vector<double>(n, inf));
  TripletBatch batch;
  for (std::size_t i = 0; i < n; ++i) {
    inst.dense[i][i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.uniform01() < 0.25) continue;  // absent pair
      const double t = rng.uniform01() * bound;
      inst.dense[i][j] = t;
      batch.push(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), t);
    }
  }
  inst.matrix = CostMatrix::from_triplets(Mode::drive, bound, n, std::move(batch));
  return inst;
}

/// Naive double-loop evaluation over the dense table.
std::vector<double> naive_accessibility(const SmallInstance& inst,
                                        const ImpedanceParams& params,
                                        double tau) {
  const std::size_t n = inst.zones.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = inst.dense[i][j];
      if (!(t <= tau)) continue;
      const double w = params.contour ? 1.0 : std::exp(-params.alpha * std::pow(t, params.beta));
      sum += inst.opps.at(static_cast<std::uint32_t>(j), 0) * (t == 0.0 ? 1.0 : w);
    }
    out[i] = sum;
  }
  return out;
}

}  // namespace

TEST_CASE("single zone keeps its own opportunities in full") {
  const ZoneSet zones({{"A", 41.88, -87.63, 10.0, 5.0}});
  OpportunityTable opps(1);
  opps.set(0, 0, 5.0);
  const auto m = CostMatrix::from_triplets(Mode::drive, 90.0, 1, {});
  const auto result = zonal_accessibility(Region::whole(zones), m, opps,
                                          "jobs_total", kBase, 30.0);
  REQUIRE(result.values.size() == 1);
  CHECK(result.values[0] == 5.0);
  CHECK(result.key.kind == "jobs_total");
  CHECK(result.key.tau == 30.0);
}

TEST_CASE("three-zone hand oracle with a threshold exclusion") {
  const ZoneSet zones({{"A", 41.0, -87.0, 1, 1},
                       {"B", 41.1, -87.0, 1, 1},
                       {"C", 41.2, -87.0, 1, 1}});
  OpportunityTable opps(3);
  opps.set(0, 0, 10.0);
  opps.set(1, 0, 20.0);
  opps.set(2, 0, 30.0);
  TripletBatch batch;
  batch.push(0, 1, 30.0);
  batch.push(0, 2, 100.0);
  const auto m = CostMatrix::from_triplets(Mode::drive, 120.0, 3, std::move(batch));

  const auto gravity = zonal_accessibility(Region::whole(zones), m, opps,
                                           "jobs_total", kBase, 60.0);
  // 10 + 20 * f(30), C excluded by the 60-minute threshold
  CHECK(gravity.values[0] ==
        doctest::Approx(16.17656339118074443738).epsilon(1e-15));

  const auto contour = zonal_accessibility(
      Region::whole(zones), m, opps, "jobs_total",
      ImpedanceParams::contour_variant("work", Mode::drive), 60.0);
  CHECK(contour.values[0] == 30.0);
}

TEST_CASE("random small instances match the naive evaluation") {
  SplitMix64 rng{31415};
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 5);
    const SmallInstance inst = random_instance(rng, n, 90.0);
    const double tau = 10.0 + rng.uniform01() * 80.0;

    const auto result = zonal_accessibility(Region::whole(inst.zones), inst.matrix,
                                            inst.opps, "jobs_total", kBase, tau);
    const auto naive = naive_accessibility(inst, kBase, tau);
    for (std::size_t i = 0; i < n; ++i) {
      if (naive[i] == 0.0) {
        CHECK(result.values[i] == 0.0);
      } else {
        CHECK(std::abs(result.values[i] - naive[i]) / naive[i] < 1e-12);
      }
    }
  }
}

TEST_CASE("aggregate equals the weighted sum of zonal values") {
  SplitMix64 rng{777};
  const SmallInstance inst = random_instance(rng, 5, 90.0);
  const auto result = zonal_accessibility(Region::whole(inst.zones), inst.matrix,
                                          inst.opps, "jobs_total", kBase, 45.0);
  const std::vector<double> weights = {0.1, 0.2, 0.3, 0.15, 0.25};
  double expected = 0.0;
  for (std::size_t k = 0; k < 5; ++k) expected += weights[k] * result.values[k];
  CHECK(aggregate(result, weights) == doctest::Approx(expected).epsilon(1e-15));

  // convex combination: bounded by the extremes
  const double chi = aggregate(result, weights);
  double lo = result.values[0], hi = result.values[0];
  for (double v : result.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(chi >= lo);
  CHECK(chi <= hi);
}

TEST_CASE("adding zero-population zones to the region leaves the aggregate unchanged") {
  SplitMix64 rng{2718};
  SmallInstance inst = random_instance(rng, 4, 90.0);
  const Region whole = Region::whole(inst.zones);
  const auto result = zonal_accessibility(whole, inst.matrix, inst.opps,
                                          "jobs_total", kBase, 60.0);

  const std::vector<double> weights = {0.5, 0.5, 0.0, 0.0};
  const Region sub(inst.zones, {"Z0", "Z1"});
  const auto sub_result = zonal_accessibility(sub, inst.matrix, inst.opps,
                                              "jobs_total", kBase, 60.0);
  CHECK(aggregate(result, weights) ==
        aggregate(sub_result, std::vector<double>{0.5, 0.5}));
}

TEST_CASE("doubling opportunities exactly doubles accessibility") {
  SplitMix64 rng{555};
  const SmallInstance inst = random_instance(rng, 6, 90.0);
  OpportunityTable doubled(inst.zones.size());
  for (std::uint32_t j = 0; j < inst.zones.size(); ++j) {
    doubled.set(j, 0, 2.0 * inst.opps.at(j, 0));
  }
  const auto base = zonal_accessibility(Region::whole(inst.zones), inst.matrix,
                                        inst.opps, "jobs_total", kBase, 60.0);
  const auto twice = zonal_accessibility(Region::whole(inst.zones), inst.matrix,
                                         doubled, "jobs_total", kBase, 60.0);
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    CHECK(twice.values[i] == 2.0 * base.values[i]);
  }
}

TEST_CASE("sweep values are nondecreasing in the threshold") {
  SplitMix64 rng{909};
  const SmallInstance inst = random_instance(rng, 6, 90.0);
  const auto results = threshold_sweep(Region::whole(inst.zones), inst.matrix,
                                       inst.opps, "jobs_total", kBase,
                                       {15.0, 30.0, 45.0, 60.0, 90.0});
  REQUIRE(results.size() == 5);
  for (std::size_t r = 1; r < results.size(); ++r) {
    for (std::size_t i = 0; i < results[r].values.size(); ++i) {
      CHECK(results[r - 1].values[i] <= results[r].values[i]);
    }
  }
  CHECK(threshold_sweep(Region::whole(inst.zones), inst.matrix, inst.opps,
                        "jobs_total", kBase, {})
            .empty());
}

TEST_CASE("intrazonal override replaces the stored self time") {
  const ZoneSet zones({{"A", 41.0, -87.0, 1, 1}});
  OpportunityTable opps(1);
  opps.set(0, 0, 10.0);
  const auto m = CostMatrix::from_triplets(Mode::drive, 90.0, 1, {});
  std::vector<double> override_minutes = {30.0};
  IntrazonalPolicy policy{&override_minutes};
  const auto result = zonal_accessibility(Region::whole(zones), m, opps,
                                          "jobs_total", kBase, 60.0, policy);
  CHECK(result.values[0] ==
        doctest::Approx(10.0 * 0.3088281695590372218688).epsilon(1e-15));
}

TEST_CASE("contour overestimation on the documented two-zone example") {
  const ZoneSet zones({{"A", 41.0, -87.0, 1, 1},
                       {"B", 41.1, -87.0, 1, 1},
                       {"C", 41.2, -87.0, 1, 1}});
  OpportunityTable opps(3);
  opps.set(0, 0, 0.0);
  opps.set(1, 0, 10.0);
  TripletBatch batch;
  batch.push(0, 1, 30.0);
  const auto m = CostMatrix::from_triplets(Mode::drive, 90.0, 3, std::move(batch));

  const auto result = contour_overestimation(Region::whole(zones), m, opps,
                                             "jobs_total", kBase, 60.0);
  // gravity a_A = 10 f(30) = 3.0883, contour a_A = 10;
  // B only reaches its own 10 opportunities at t = 0, so both measures
  // agree there and the overestimation is 0
  REQUIRE(result.ids.size() == 2);
  CHECK(result.ids[0] == "A");
  CHECK(result.percent[0] ==
        doctest::Approx(223.8046585672084311921).epsilon(1e-12));
  CHECK(result.ids[1] == "B");
  CHECK(result.percent[1] == 0.0);
  // C reaches nothing at all: undefined, never reported as a number
  REQUIRE(result.undefined_ids.size() == 1);
  CHECK(result.undefined_ids[0] == "C");
}

TEST_CASE("contour dominates gravity on random instances") {
  SplitMix64 rng{1234};
  for (int round = 0; round < 20; ++round) {
    const SmallInstance inst = random_instance(rng, 5, 90.0);
    const auto result = contour_overestimation(
        Region::whole(inst.zones), inst.matrix, inst.opps, "jobs_total", kBase,
        45.0);
    for (double pct : result.percent) CHECK(pct >= 0.0);
  }
}

TEST_CASE("query validation") {
  SplitMix64 rng{42};
  const SmallInstance inst = random_instance(rng, 3, 60.0);
  const Region whole = Region::whole(inst.zones);

  try {
    zonal_accessibility(whole, inst.matrix, inst.opps, "jobs_total", kBase, 61.0);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ThresholdExceedsPrune);
  }
  try {
    zonal_accessibility(whole, inst.matrix, inst.opps, "nonsense", kBase, 30.0);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKind);
  }
  try {
    const auto walk_params = ImpedanceParams::gravity(0.008, 1.467, "work",
                                                      Mode::walk);
    zonal_accessibility(whole, inst.matrix, inst.opps, "jobs_total", walk_params,
                        30.0);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModeMismatch);
  }
  try {
    const auto result = zonal_accessibility(whole, inst.matrix, inst.opps,
                                            "jobs_total", kBase, 30.0);
    aggregate(result, {0.5, 0.5});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  try {
    const auto result = zonal_accessibility(whole, inst.matrix, inst.opps,
                                            "jobs_total", kBase, 30.0);
    aggregate(result, {0.5, 0.2, 0.2});  // sums to 0.9
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  try {
    contour_overestimation(whole, inst.matrix, inst.opps, "jobs_total",
                           ImpedanceParams::contour_variant("work", Mode::drive),
                           30.0);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
}

TEST_CASE("results are identical at any thread count") {
  SplitMix64 rng{8080};
  const SmallInstance inst = random_instance(rng, 6, 90.0);
  const Region whole = Region::whole(inst.zones);
  const auto one = zonal_accessibility(whole, inst.matrix, inst.opps,
                                       "jobs_total", kBase, 60.0, {}, 1);
  const auto eight = zonal_accessibility(whole, inst.matrix, inst.opps,
                                         "jobs_total", kBase, 60.0, {}, 8);
  for (std::size_t i = 0; i < one.values.size(); ++i) {
    CHECK(one.values[i] == eight.values[i]);
  }
}
