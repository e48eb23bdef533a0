// gravcat — generalized locational accessibility toolkit.
//
// Subcommands: fit, access, aggregate, sweep, contour-compare, efficiency,
// sedi, improve, rank-shift, synth. Exit codes: 0 success, 2 usage error,
// 3 input-file parse error, 4 computation error. Every generated file
// carries an audit comment block (tool version, resolved parameters, input
// digests). Outputs are byte-identical for any --threads value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gravcat/access.hpp"
#include "gravcat/audit.hpp"
#include "gravcat/cost_matrix.hpp"
#include "gravcat/efficiency.hpp"
#include "gravcat/equity.hpp"
#include "gravcat/errors.hpp"
#include "gravcat/impedance.hpp"
#include "gravcat/io.hpp"
#include "gravcat/netgen.hpp"
#include "gravcat/opportunity.hpp"
#include "gravcat/parallel.hpp"
#include "gravcat/zone.hpp"

namespace {

using namespace gravcat;

// ---------------------------------------------------------------------------
// audit assembly

/// Collects the resolved configuration of a run. The thread count is
/// deliberately excluded everywhere: outputs must be byte-identical for any
/// --threads value.
struct AuditBuilder {
  explicit AuditBuilder(std::string subcommand) : command_(std::move(subcommand)) {}

  void param(const std::string& key, const std::string& value) {
    info_.params.emplace_back(key, value);
    command_ += " --" + key + " " + value;
  }
  void param(const std::string& key, double value) { param(key, format_double(value)); }
  void param_flag(const std::string& key) {
    info_.params.emplace_back(key, "true");
    command_ += " --" + key;
  }
  void input(const std::string& key, const std::string& path) {
    info_.inputs.emplace_back(path, fnv1a_file(path));
    command_ += " --" + key + " " + path;
  }

  const AuditInfo& build() {
    info_.command = command_;
    return info_;
  }

 private:
  std::string command_;
  AuditInfo info_;
};

// ---------------------------------------------------------------------------
// shared option groups

struct MatrixOptions {
  std::string csv_path;
  std::string cache_path;
  double max_minutes = 0.0;  // 0 = derive from the largest tau in the run
};

struct ParamsOptions {
  std::string params_path;
  std::string purpose;  // defaults to the opportunity kind
  bool contour = false;
};

void add_matrix_options(CLI::App* cmd, MatrixOptions& opt) {
  auto* csv = cmd->add_option("--matrix", opt.csv_path,
                              "travel-time matrix CSV (origin_id,destination_id,minutes)");
  auto* cache = cmd->add_option("--cache", opt.cache_path,
                                "binary travel-time matrix cache (GCAT01)");
  cmd->add_option("--max-minutes", opt.max_minutes,
                  "prune bound the matrix CSV was built with (default: largest tau in the run)");
  csv->excludes(cache);
  cache->excludes(csv);
}

void add_params_options(CLI::App* cmd, ParamsOptions& opt, bool allow_contour) {
  auto* params = cmd->add_option("--params", opt.params_path,
                                 "fitted impedance parameters (params.json)");
  cmd->add_option("--purpose", opt.purpose,
                  "impedance purpose key (default: the opportunity kind)");
  if (allow_contour) {
    auto* contour = cmd->add_flag("--contour", opt.contour,
                                  "constant unit weight inside the threshold instead of decay");
    params->excludes(contour);
    contour->excludes(params);
  }
}

int add_threads_option(CLI::App* cmd, int& threads) {
  cmd->add_option("--threads", threads,
                  "worker threads (default: GRAVCAT_THREADS or all cores)");
  return 0;
}

// ---------------------------------------------------------------------------
// loading helpers

ZoneSet load_zones(const std::string& path, AuditBuilder& audit) {
  ZoneSet zones = parse_zones_csv(path);
  audit.input("zones", path);
  return zones;
}

Region load_region(const std::string& path, const ZoneSet& zones,
                   AuditBuilder& audit) {
  if (path.empty()) return Region::whole(zones);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::vector<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!zones.contains(line)) {
      throw Error(ErrorCode::UnknownZone,
                  "zone '" + line + "' is not in the zone table", path, number);
    }
    ids.push_back(line);
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "failed reading '" + path + "'");
  audit.input("region", path);
  return Region(zones, std::move(ids));
}

CostMatrix load_matrix(const MatrixOptions& opt, const ZoneSet& zones, Mode mode,
                       double needed_tau, int threads, AuditBuilder& audit) {
  if (!opt.cache_path.empty()) {
    CostMatrix matrix = read_matrix_cache(opt.cache_path);
    audit.input("cache", opt.cache_path);
    return matrix;
  }
  if (opt.csv_path.empty()) {
    throw CLI::RequiredError("--matrix or --cache");
  }
  const double bound = opt.max_minutes > 0.0 ? opt.max_minutes : needed_tau;
  CostMatrix matrix = parse_matrix_csv(opt.csv_path, zones, mode, bound, threads);
  audit.input("matrix", opt.csv_path);
  return matrix;
}

/// Resolves the impedance function: the contour variant, or a gravity
/// lookup from params.json under (purpose, mode).
ImpedanceParams load_params(const ParamsOptions& opt, const std::string& kind,
                            Mode mode, AuditBuilder& audit) {
  const std::string purpose = opt.purpose.empty() ? kind : opt.purpose;
  if (opt.contour) {
    audit.param_flag("contour");
    return ImpedanceParams::contour_variant(purpose.empty() ? "contour" : purpose,
                                            mode);
  }
  if (opt.params_path.empty()) {
    throw CLI::RequiredError("--params (or --contour)");
  }
  if (purpose.empty()) {
    throw CLI::RequiredError("--purpose");
  }
  const ParamsRegistry registry = parse_params_json(opt.params_path);
  audit.input("params", opt.params_path);
  audit.param("purpose", purpose);
  return registry.find(purpose, mode).params;
}

std::vector<ResultRow> to_result_rows(const AccessibilityResult& result) {
  std::vector<ResultRow> rows;
  rows.reserve(result.ids.size());
  for (std::size_t k = 0; k < result.ids.size(); ++k) {
    rows.push_back({result.ids[k], result.key.kind, result.key.mode,
                    result.key.tau, result.values[k]});
  }
  return rows;
}

void write_value_geojson(const std::string& path, const ZoneSet& zones,
                         const std::vector<std::string>& ids,
                         const AccessKey& key, const std::string& value_name,
                         const std::vector<double>& values,
                         const AuditInfo& audit) {
  const std::vector<std::pair<std::string, std::string>> constants = {
      {"kind", key.kind},
      {"mode", mode_name(key.mode)},
      {"tau", format_double(key.tau)},
  };
  write_points_geojson(path, zones, ids, constants, {{value_name, values}}, &audit);
}

// ---------------------------------------------------------------------------
// fit

struct FitCmd {
  std::string trips_path;
  std::string out_path;
  std::string cdf_out;
  std::string purpose_filter;
  std::string mode_filter;
  double bin_width = kDefaultBinWidthMin;
  double window = 5.0;
  int threads = 0;

  int run() {
    AuditBuilder audit("fit");
    const std::vector<TripRecord> trips = parse_trips_csv(trips_path);
    audit.input("trips", trips_path);
    audit.param("bin-width", bin_width);

    // every (purpose, mode) pair present, unless filtered down
    std::set<std::pair<std::string, int>> keys;
    for (const TripRecord& trip : trips) {
      if (!purpose_filter.empty() && trip.purpose != purpose_filter) continue;
      if (!mode_filter.empty() && trip.mode != mode_from_name(mode_filter)) continue;
      keys.emplace(trip.purpose, static_cast<int>(trip.mode));
    }
    if (keys.empty()) {
      throw Error(ErrorCode::InsufficientData,
                  "no trips match the requested purpose/mode");
    }
    ParamsRegistry registry;
    for (const auto& [purpose, mode_int] : keys) {
      registry.insert(fit(trips, purpose, static_cast<Mode>(mode_int), bin_width));
    }
    write_params_json(out_path, registry);

    if (!cdf_out.empty()) {
      if (purpose_filter.empty() || mode_filter.empty()) {
        throw CLI::RequiredError("--purpose and --mode (required with --cdf-out)");
      }
      const Mode mode = mode_from_name(mode_filter);
      const DurationCdf cdf = duration_cdf(trips, purpose_filter, mode, window);
      audit.param("cdf-purpose", purpose_filter);
      audit.param("cdf-mode", mode_filter);
      audit.param("window", window);
      std::ofstream out(cdf_out, std::ios::binary);
      if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + cdf_out + "' for writing");
      }
      out << audit_comment_block(audit.build());
      out << "minutes,cumulative_fraction\n";
      for (std::size_t k = 0; k < cdf.minutes.size(); ++k) {
        out << format_double(cdf.minutes[k]) << ',' << format_double(cdf.cumulative[k])
            << '\n';
      }
      out.flush();
      if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + cdf_out + "'");
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// access / aggregate / sweep

struct AccessCmd {
  std::string zones_path, opps_path, region_path, out_path, geojson_path;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string kind;
  std::string mode_name_str = "drive";
  double tau = 0.0;
  int threads = 0;

  int run() {
    AuditBuilder audit("access");
    const Mode mode = mode_from_name(mode_name_str);
    const ZoneSet zones = load_zones(zones_path, audit);
    const OpportunityTable opps = parse_opportunities_csv(opps_path, zones);
    audit.input("opportunities", opps_path);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, kind, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    audit.param("kind", kind);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);

    const AccessibilityResult result =
        zonal_accessibility(region, mat, opps, kind, imp, tau, {}, threads);
    const AuditInfo& info = audit.build();
    write_results_csv(out_path, to_result_rows(result), &info);
    if (!geojson_path.empty()) {
      write_value_geojson(geojson_path, zones, result.ids, result.key,
                          "accessibility", result.values, info);
    }
    return 0;
  }
};

struct AggregateCmd {
  std::string zones_path, opps_path, region_path, out_path;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string kind;
  std::string mode_name_str = "drive";
  std::string basis_name = "population";
  double tau = 0.0;
  int threads = 0;

  int run() {
    AuditBuilder audit("aggregate");
    const Mode mode = mode_from_name(mode_name_str);
    const WeightBasis basis = weight_basis_from_name(basis_name);
    const ZoneSet zones = load_zones(zones_path, audit);
    const OpportunityTable opps = parse_opportunities_csv(opps_path, zones);
    audit.input("opportunities", opps_path);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, kind, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    audit.param("kind", kind);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);
    audit.param("basis", basis_name);

    const AccessibilityResult result =
        zonal_accessibility(region, mat, opps, kind, imp, tau, {}, threads);
    const std::vector<double> weights = population_weights(zones, region, basis);
    const double chi = aggregate(result, weights);

    std::cout << format_double(chi) << "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + out_path + "' for writing");
      }
      out << audit_comment_block(audit.build());
      out << "kind,mode,tau,basis,chi\n";
      out << kind << ',' << mode_name_str << ',' << format_double(tau) << ','
          << basis_name << ',' << format_double(chi) << '\n';
      out.flush();
      if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + out_path + "'");
    }
    return 0;
  }
};

struct SweepCmd {
  std::string zones_path, opps_path, region_path, out_path;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string kind;
  std::string mode_name_str = "drive";
  std::vector<double> taus;
  int threads = 0;

  int run() {
    AuditBuilder audit("sweep");
    const Mode mode = mode_from_name(mode_name_str);
    const ZoneSet zones = load_zones(zones_path, audit);
    const OpportunityTable opps = parse_opportunities_csv(opps_path, zones);
    audit.input("opportunities", opps_path);
    double max_tau = 0.0;
    for (double t : taus) max_tau = std::max(max_tau, t);
    const CostMatrix mat = load_matrix(matrix, zones, mode, max_tau, threads, audit);
    const ImpedanceParams imp = load_params(params, kind, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    audit.param("kind", kind);
    audit.param("mode", mode_name_str);
    {
      std::string joined;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        if (k) joined += ",";
        joined += format_double(taus[k]);
      }
      audit.param("taus", joined);
    }

    const std::vector<AccessibilityResult> results =
        threshold_sweep(region, mat, opps, kind, imp, taus, {}, threads);
    std::vector<ResultRow> rows;
    for (const AccessibilityResult& result : results) {
      const auto block = to_result_rows(result);
      rows.insert(rows.end(), block.begin(), block.end());
    }
    const AuditInfo& info = audit.build();
    write_results_csv(out_path, rows, &info);
    return 0;
  }
};

// ---------------------------------------------------------------------------
// contour-compare

struct ContourCompareCmd {
  std::string zones_path, opps_path, region_path, out_path, undefined_out;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string kind;
  std::string mode_name_str = "drive";
  double tau = 0.0;
  int threads = 0;

  int run() {
    AuditBuilder audit("contour-compare");
    const Mode mode = mode_from_name(mode_name_str);
    const ZoneSet zones = load_zones(zones_path, audit);
    const OpportunityTable opps = parse_opportunities_csv(opps_path, zones);
    audit.input("opportunities", opps_path);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, kind, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    audit.param("kind", kind);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);

    const OverestimationResult result =
        contour_overestimation(region, mat, opps, kind, imp, tau, {}, threads);
    audit.param("undefined-zone-count", std::to_string(result.undefined_ids.size()));

    std::vector<ResultRow> rows;
    rows.reserve(result.ids.size());
    for (std::size_t k = 0; k < result.ids.size(); ++k) {
      rows.push_back({result.ids[k], kind, mode, tau, result.percent[k]});
    }
    const AuditInfo& info = audit.build();
    write_results_csv(out_path, rows, &info);
    if (!undefined_out.empty()) {
      std::ofstream out(undefined_out, std::ios::binary);
      if (!out) {
        throw Error(ErrorCode::IoFailure,
                    "cannot open '" + undefined_out + "' for writing");
      }
      out << audit_comment_block(info) << "zone_id\n";
      for (const std::string& id : result.undefined_ids) out << id << '\n';
      out.flush();
      if (!out) {
        throw Error(ErrorCode::IoFailure, "failed writing '" + undefined_out + "'");
      }
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// efficiency

struct EfficiencyCmd {
  std::string zones_path, opps_path, region_path, out_path, geojson_path,
      aggregate_out;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string kind;
  std::string mode_name_str = "drive";
  std::string basis_name = "population";
  double tau = 0.0;
  double vmax = 0.0;  // 0 = modal default
  int threads = 0;

  int run() {
    AuditBuilder audit("efficiency");
    const Mode mode = mode_from_name(mode_name_str);
    const WeightBasis basis = weight_basis_from_name(basis_name);
    const ZoneSet zones = load_zones(zones_path, audit);
    const OpportunityTable opps = parse_opportunities_csv(opps_path, zones);
    audit.input("opportunities", opps_path);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, kind, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    const double v_max =
        vmax > 0.0 ? vmax : kDefaultMaxSpeedMph[static_cast<std::size_t>(mode)];
    audit.param("kind", kind);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);
    audit.param("vmax", v_max);
    audit.param("basis", basis_name);

    const AccessibilityResult observed =
        zonal_accessibility(region, mat, opps, kind, imp, tau, {}, threads);
    const AccessibilityResult ideal =
        ideal_accessibility(region, zones, opps, kind, imp, v_max, tau, threads);
    const std::vector<double> weights = population_weights(zones, region, basis);
    const EfficiencyResult result = efficiency(observed, ideal, weights);

    std::size_t undefined = 0;
    for (std::uint8_t d : result.defined) undefined += (d == 0);
    audit.param("undefined-zone-count", std::to_string(undefined));
    audit.param("flagged-zone-count", std::to_string(result.flagged.size()));

    std::vector<ResultRow> rows;
    rows.reserve(result.ids.size());
    for (std::size_t k = 0; k < result.ids.size(); ++k) {
      if (!result.defined[k]) continue;
      rows.push_back({result.ids[k], kind, mode, tau, result.zonal[k]});
    }
    const AuditInfo& info = audit.build();
    write_results_csv(out_path, rows, &info);
    if (!geojson_path.empty()) {
      write_value_geojson(geojson_path, zones, result.ids, result.key, "eta",
                          result.zonal, info);
    }
    if (result.aggregate_defined) {
      std::cout << format_double(result.aggregate) << "\n";
    } else {
      std::cout << "undefined\n";
    }
    if (!aggregate_out.empty()) {
      std::ofstream out(aggregate_out, std::ios::binary);
      if (!out) {
        throw Error(ErrorCode::IoFailure,
                    "cannot open '" + aggregate_out + "' for writing");
      }
      out << audit_comment_block(info);
      out << "kind,mode,tau,basis,eta\n";
      if (result.aggregate_defined) {
        out << kind << ',' << mode_name_str << ',' << format_double(tau) << ','
            << basis_name << ',' << format_double(result.aggregate) << '\n';
      }
      out.flush();
      if (!out) {
        throw Error(ErrorCode::IoFailure, "failed writing '" + aggregate_out + "'");
      }
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// sedi / improve / rank-shift

struct SediCmd {
  std::string zones_path, demographics_path, region_path, out_path, geojson_path;
  int threads = 0;

  int run() {
    AuditBuilder audit("sedi");
    const ZoneSet zones = load_zones(zones_path, audit);
    const SediFactors factors = parse_demographics_csv(demographics_path, zones);
    audit.input("demographics", demographics_path);
    const Region region = load_region(region_path, zones, audit);

    const SediTable table = sedi(factors, zones, region);
    if (!table.excluded.empty()) {
      std::cerr << "warning: " << table.excluded.size()
                << " zone(s) excluded for incomplete factors\n";
    }
    audit.param("excluded-zone-count", std::to_string(table.excluded.size()));
    const AuditInfo& info = audit.build();
    write_sedi_csv(out_path, table, &info);
    if (!geojson_path.empty()) {
      write_points_geojson(geojson_path, zones, table.ids, {},
                           {{"sedi", table.index}}, &info);
    }
    return 0;
  }
};

struct ImproveCmd {
  std::string zones_path, demographics_path, region_path, out_path, geojson_path;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string mode_name_str = "drive";
  std::string basis_name = "population";
  double tau = 0.0;
  double lambda = -1.0;  // < 0 = plain population weights
  int threads = 0;

  int run() {
    AuditBuilder audit("improve");
    const Mode mode = mode_from_name(mode_name_str);
    const WeightBasis basis = weight_basis_from_name(basis_name);
    const ZoneSet zones = load_zones(zones_path, audit);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, {}, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);
    audit.param("basis", basis_name);

    std::vector<double> weights;
    std::string label;
    if (lambda >= 0.0) {
      if (demographics_path.empty()) {
        throw CLI::RequiredError("--demographics (required with --lambda)");
      }
      const SediFactors factors = parse_demographics_csv(demographics_path, zones);
      audit.input("demographics", demographics_path);
      const SediTable table = sedi(factors, zones, region);
      weights = sedi_weighted_population(zones, table, region, lambda, basis);
      label = "sedi";
      audit.param("lambda", lambda);
    } else {
      weights = population_weights(zones, region, basis);
      label = "unweighted";
    }
    audit.param("weighting", label);

    const ImprovementPotential potential =
        improvement_potential(region, mat, imp, tau, weights, label, threads);
    const AuditInfo& info = audit.build();
    write_improvement_csv(out_path, potential, &info);
    if (!geojson_path.empty()) {
      std::vector<double> ranks(potential.rank.begin(), potential.rank.end());
      write_points_geojson(geojson_path, zones, potential.ids,
                           {{"mode", mode_name_str}, {"tau", format_double(tau)},
                            {"weighting", label}},
                           {{"gradient", potential.gradient}, {"rank", ranks}},
                           &info);
    }
    return 0;
  }
};

struct RankShiftCmd {
  std::string zones_path, demographics_path, region_path, out_path;
  MatrixOptions matrix;
  ParamsOptions params;
  std::string mode_name_str = "drive";
  std::string basis_name = "population";
  double tau = 0.0;
  double lambda = 1.0;
  int threads = 0;

  int run() {
    AuditBuilder audit("rank-shift");
    const Mode mode = mode_from_name(mode_name_str);
    const WeightBasis basis = weight_basis_from_name(basis_name);
    const ZoneSet zones = load_zones(zones_path, audit);
    const CostMatrix mat = load_matrix(matrix, zones, mode, tau, threads, audit);
    const ImpedanceParams imp = load_params(params, {}, mode, audit);
    const Region region = load_region(region_path, zones, audit);
    const SediFactors factors = parse_demographics_csv(demographics_path, zones);
    audit.input("demographics", demographics_path);
    audit.param("mode", mode_name_str);
    audit.param("tau", tau);
    audit.param("basis", basis_name);
    audit.param("lambda", lambda);

    const std::vector<double> base = population_weights(zones, region, basis);
    const SediTable table = sedi(factors, zones, region);
    const std::vector<double> weighted_p =
        sedi_weighted_population(zones, table, region, lambda, basis);

    const ImprovementPotential unweighted =
        improvement_potential(region, mat, imp, tau, base, "unweighted", threads);
    const ImprovementPotential weighted =
        improvement_potential(region, mat, imp, tau, weighted_p, "sedi", threads);
    const RankShift shift = rank_shift(unweighted, weighted);
    const AuditInfo& info = audit.build();
    write_rank_shift_csv(out_path, shift, &info);
    return 0;
  }
};

// ---------------------------------------------------------------------------
// synth

struct SynthCmd {
  SyntheticCityConfig config;
  std::string layout_name = "grid";
  std::string grid_spec;  // "ROWSxCOLS"
  std::vector<std::string> opp_gamma_specs;  // "kind=gamma"
  std::vector<std::string> modes = {"drive", "walk", "bike"};
  std::string out_dir = ".";
  double max_minutes = 90.0;
  bool write_cache = false;
  int threads = 0;

  int run() {
    AuditBuilder audit("synth");
    if (layout_name == "grid") {
      config.layout = Layout::grid;
    } else if (layout_name == "radial") {
      config.layout = Layout::radial;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown layout '" + layout_name + "'");
    }
    if (!grid_spec.empty()) {
      const auto x = grid_spec.find('x');
      std::uint32_t rows = 0, cols = 0;
      bool ok = x != std::string::npos;
      if (ok) {
        try {
          rows = static_cast<std::uint32_t>(std::stoul(grid_spec.substr(0, x)));
          cols = static_cast<std::uint32_t>(std::stoul(grid_spec.substr(x + 1)));
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || rows == 0 || cols == 0) {
        throw Error(ErrorCode::InvalidConfig,
                    "--grid expects ROWSxCOLS, e.g. 30x30; got '" + grid_spec + "'");
      }
      config.layout = Layout::grid;
      config.grid_rows = rows;
      config.grid_cols = cols;
    }
    for (const std::string& spec : opp_gamma_specs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::InvalidConfig,
                    "--opportunity-gamma expects KIND=VALUE; got '" + spec + "'");
      }
      double gamma = 0.0;
      try {
        gamma = std::stod(spec.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig,
                    "--opportunity-gamma expects KIND=VALUE; got '" + spec + "'");
      }
      config.opportunity_gamma[spec.substr(0, eq)] = gamma;
    }
    if (max_minutes <= 0.0 || !std::isfinite(max_minutes)) {
      throw Error(ErrorCode::InvalidConfig, "--max-minutes must be positive");
    }

    audit.param("layout", layout_name);
    if (config.layout == Layout::grid) {
      audit.param("grid", std::to_string(config.grid_rows) + "x" +
                              std::to_string(config.grid_cols));
    } else {
      audit.param("rings", std::to_string(config.radial_rings));
      audit.param("per-ring", std::to_string(config.radial_per_ring));
    }
    audit.param("spacing-km", config.spacing_km);
    audit.param("origin-lat", config.origin_lat);
    audit.param("origin-lon", config.origin_lon);
    audit.param("population-scale", config.population_scale);
    audit.param("population-gamma", config.population_gamma);
    audit.param("worker-share", config.worker_share);
    audit.param("opportunity-scale", config.opportunity_scale);
    for (const std::string& spec : opp_gamma_specs) {
      audit.param("opportunity-gamma", spec);
    }
    audit.param("jitter", config.jitter);
    audit.param("drive-mph", config.drive_mph);
    audit.param("walk-mph", config.walk_mph);
    audit.param("bike-mph", config.bike_mph);
    audit.param("sprawl-edge-removal", config.sprawl_edge_removal);
    audit.param("sprawl-speed-decay", config.sprawl_speed_decay);
    audit.param("sedi-gradient", config.sedi_gradient);
    audit.param("seed", std::to_string(config.seed));
    audit.param("max-minutes", max_minutes);

    const SyntheticCity city = generate(config);
    if (!city.graph.connected) {
      std::cerr << "warning: sprawl edge removal disconnected the road graph\n";
    }

    std::filesystem::create_directories(out_dir);
    const auto in_dir = [&](const std::string& name) {
      return (std::filesystem::path(out_dir) / name).string();
    };
    const AuditInfo& info = audit.build();
    write_zones_csv(in_dir("zones.csv"), city.zones, &info);
    write_opportunities_csv(in_dir("opportunities.csv"), city.opportunities,
                            city.zones, &info);
    write_demographics_csv(in_dir("demographics.csv"), city.factors, city.zones,
                           &info);
    for (const std::string& mode_str : modes) {
      const Mode mode = mode_from_name(mode_str);
      const CostMatrix mat =
          travel_time_matrix(city.graph, mode, max_minutes, threads);
      write_matrix_csv(in_dir("matrix_" + mode_str + ".csv"), mat, city.zones,
                       &info);
      if (write_cache) {
        write_matrix_cache(in_dir("matrix_" + mode_str + ".gcat"), mat);
      }
    }
    return 0;
  }
};

// ---------------------------------------------------------------------------
// --config: JSON mirror of the flag surface

std::vector<std::string> args_from_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CLI::FileError("cannot open config '" + path + "'");
  }
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::FileError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string()) {
    throw CLI::FileError("config must be an object with a string 'command'");
  }
  std::vector<std::string> args;
  args.push_back(doc["command"].get<std::string>());
  if (doc.contains("flags")) {
    if (!doc["flags"].is_object()) {
      throw CLI::FileError("config 'flags' must be an object");
    }
    const auto render = [](const nlohmann::ordered_json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number_unsigned())
        return std::to_string(v.get<unsigned long long>());
      if (v.is_number_float()) return format_double(v.get<double>());
      throw CLI::FileError("config flag values must be strings, numbers, or booleans");
    };
    for (const auto& [key, value] : doc["flags"].items()) {
      if (value.is_boolean()) {
        if (value.get<bool>()) args.push_back("--" + key);
        continue;
      }
      if (value.is_array()) {
        for (const auto& element : value) {
          args.push_back("--" + key);
          args.push_back(render(element));
        }
        continue;
      }
      args.push_back("--" + key);
      args.push_back(render(value));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locational accessibility toolkit (thresholded gravity measure)"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string("gravcat ") + kToolVersion);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file {\"command\":..., \"flags\":{...}} mirroring the flags");

  FitCmd fit_cmd;
  auto* fit_sub = app.add_subcommand("fit", "fit impedance parameters from trips");
  fit_sub->add_option("--trips", fit_cmd.trips_path, "trip records CSV")->required();
  fit_sub->add_option("--out", fit_cmd.out_path, "output params.json")->required();
  fit_sub->add_option("--bin-width", fit_cmd.bin_width, "duration bin width, minutes");
  fit_sub->add_option("--purpose", fit_cmd.purpose_filter, "only this purpose");
  fit_sub->add_option("--mode", fit_cmd.mode_filter, "only this mode");
  fit_sub->add_option("--cdf-out", fit_cmd.cdf_out,
                      "also write the smoothed duration CDF for --purpose/--mode");
  fit_sub->add_option("--window", fit_cmd.window, "CDF smoothing window, minutes");
  add_threads_option(fit_sub, fit_cmd.threads);

  AccessCmd access_cmd;
  auto* access_sub =
      app.add_subcommand("access", "per-zone accessibility for one kind/mode/tau");
  access_sub->add_option("--zones", access_cmd.zones_path, "zones CSV")->required();
  access_sub->add_option("--opportunities", access_cmd.opps_path, "opportunities CSV")
      ->required();
  add_matrix_options(access_sub, access_cmd.matrix);
  add_params_options(access_sub, access_cmd.params, true);
  access_sub->add_option("--kind", access_cmd.kind, "opportunity kind")->required();
  access_sub->add_option("--mode", access_cmd.mode_name_str, "drive|walk|bike");
  access_sub->add_option("--tau", access_cmd.tau, "travel-time threshold, minutes")
      ->required();
  access_sub->add_option("--region", access_cmd.region_path,
                         "file with one zone id per line (default: all zones)");
  access_sub->add_option("--out", access_cmd.out_path, "output results CSV")
      ->required();
  access_sub->add_option("--geojson", access_cmd.geojson_path,
                         "optional GeoJSON points output");
  add_threads_option(access_sub, access_cmd.threads);

  AggregateCmd aggregate_cmd;
  auto* aggregate_sub =
      app.add_subcommand("aggregate", "population-weighted aggregate accessibility");
  aggregate_sub->add_option("--zones", aggregate_cmd.zones_path, "zones CSV")
      ->required();
  aggregate_sub
      ->add_option("--opportunities", aggregate_cmd.opps_path, "opportunities CSV")
      ->required();
  add_matrix_options(aggregate_sub, aggregate_cmd.matrix);
  add_params_options(aggregate_sub, aggregate_cmd.params, true);
  aggregate_sub->add_option("--kind", aggregate_cmd.kind, "opportunity kind")
      ->required();
  aggregate_sub->add_option("--mode", aggregate_cmd.mode_name_str, "drive|walk|bike");
  aggregate_sub->add_option("--tau", aggregate_cmd.tau, "threshold, minutes")
      ->required();
  aggregate_sub->add_option("--basis", aggregate_cmd.basis_name,
                            "population|workers weighting basis");
  aggregate_sub->add_option("--region", aggregate_cmd.region_path,
                            "file with one zone id per line");
  aggregate_sub->add_option("--out", aggregate_cmd.out_path,
                            "optional one-row summary CSV");
  add_threads_option(aggregate_sub, aggregate_cmd.threads);

  SweepCmd sweep_cmd;
  auto* sweep_sub =
      app.add_subcommand("sweep", "accessibility across several thresholds");
  sweep_sub->add_option("--zones", sweep_cmd.zones_path, "zones CSV")->required();
  sweep_sub->add_option("--opportunities", sweep_cmd.opps_path, "opportunities CSV")
      ->required();
  add_matrix_options(sweep_sub, sweep_cmd.matrix);
  add_params_options(sweep_sub, sweep_cmd.params, true);
  sweep_sub->add_option("--kind", sweep_cmd.kind, "opportunity kind")->required();
  sweep_sub->add_option("--mode", sweep_cmd.mode_name_str, "drive|walk|bike");
  sweep_sub->add_option("--taus", sweep_cmd.taus, "thresholds, minutes")
      ->required()
      ->delimiter(',');
  sweep_sub->add_option("--region", sweep_cmd.region_path,
                        "file with one zone id per line");
  sweep_sub->add_option("--out", sweep_cmd.out_path, "output results CSV")->required();
  add_threads_option(sweep_sub, sweep_cmd.threads);

  ContourCompareCmd contour_cmd;
  auto* contour_sub = app.add_subcommand(
      "contour-compare", "percent overestimation of the constant-weight count");
  contour_sub->add_option("--zones", contour_cmd.zones_path, "zones CSV")->required();
  contour_sub
      ->add_option("--opportunities", contour_cmd.opps_path, "opportunities CSV")
      ->required();
  add_matrix_options(contour_sub, contour_cmd.matrix);
  add_params_options(contour_sub, contour_cmd.params, false);
  contour_sub->add_option("--kind", contour_cmd.kind, "opportunity kind")->required();
  contour_sub->add_option("--mode", contour_cmd.mode_name_str, "drive|walk|bike");
  contour_sub->add_option("--tau", contour_cmd.tau, "threshold, minutes")->required();
  contour_sub->add_option("--region", contour_cmd.region_path,
                          "file with one zone id per line");
  contour_sub->add_option("--out", contour_cmd.out_path, "output results CSV")
      ->required();
  contour_sub->add_option("--undefined-out", contour_cmd.undefined_out,
                          "optional list of zones with zero decayed accessibility");
  add_threads_option(contour_sub, contour_cmd.threads);

  EfficiencyCmd efficiency_cmd;
  auto* efficiency_sub = app.add_subcommand(
      "efficiency", "observed vs straight-line-ideal accessibility ratio");
  efficiency_sub->add_option("--zones", efficiency_cmd.zones_path, "zones CSV")
      ->required();
  efficiency_sub
      ->add_option("--opportunities", efficiency_cmd.opps_path, "opportunities CSV")
      ->required();
  add_matrix_options(efficiency_sub, efficiency_cmd.matrix);
  add_params_options(efficiency_sub, efficiency_cmd.params, true);
  efficiency_sub->add_option("--kind", efficiency_cmd.kind, "opportunity kind")
      ->required();
  efficiency_sub->add_option("--mode", efficiency_cmd.mode_name_str,
                             "drive|walk|bike");
  efficiency_sub->add_option("--tau", efficiency_cmd.tau, "threshold, minutes")
      ->required();
  efficiency_sub->add_option("--vmax", efficiency_cmd.vmax,
                             "assumed maximum modal speed, mi/h (default 60/4/16)");
  efficiency_sub->add_option("--basis", efficiency_cmd.basis_name,
                             "population|workers weighting basis");
  efficiency_sub->add_option("--region", efficiency_cmd.region_path,
                             "file with one zone id per line");
  efficiency_sub->add_option("--out", efficiency_cmd.out_path, "per-zone eta CSV")
      ->required();
  efficiency_sub->add_option("--geojson", efficiency_cmd.geojson_path,
                             "optional GeoJSON points output");
  efficiency_sub->add_option("--aggregate-out", efficiency_cmd.aggregate_out,
                             "optional one-row aggregate CSV");
  add_threads_option(efficiency_sub, efficiency_cmd.threads);

  SediCmd sedi_cmd;
  auto* sedi_sub =
      app.add_subcommand("sedi", "composite disadvantage index from demographics");
  sedi_sub->add_option("--zones", sedi_cmd.zones_path, "zones CSV")->required();
  sedi_sub->add_option("--demographics", sedi_cmd.demographics_path,
                       "demographics CSV")
      ->required();
  sedi_sub->add_option("--region", sedi_cmd.region_path,
                       "file with one zone id per line");
  sedi_sub->add_option("--out", sedi_cmd.out_path, "output CSV (zone_id,sedi)")
      ->required();
  sedi_sub->add_option("--geojson", sedi_cmd.geojson_path,
                       "optional GeoJSON points output");
  add_threads_option(sedi_sub, sedi_cmd.threads);

  ImproveCmd improve_cmd;
  auto* improve_sub = app.add_subcommand(
      "improve", "per-zone improvement potential of the aggregate accessibility");
  improve_sub->add_option("--zones", improve_cmd.zones_path, "zones CSV")->required();
  add_matrix_options(improve_sub, improve_cmd.matrix);
  add_params_options(improve_sub, improve_cmd.params, true);
  improve_sub->add_option("--mode", improve_cmd.mode_name_str, "drive|walk|bike");
  improve_sub->add_option("--tau", improve_cmd.tau, "threshold, minutes")->required();
  improve_sub->add_option("--basis", improve_cmd.basis_name,
                          "population|workers weighting basis");
  improve_sub->add_option("--lambda", improve_cmd.lambda,
                          "disadvantage-weighting strength (needs --demographics)");
  improve_sub->add_option("--demographics", improve_cmd.demographics_path,
                          "demographics CSV for --lambda");
  improve_sub->add_option("--region", improve_cmd.region_path,
                          "file with one zone id per line");
  improve_sub
      ->add_option("--out", improve_cmd.out_path,
                   "output CSV (zone_id,gradient,rank,weighting)")
      ->required();
  improve_sub->add_option("--geojson", improve_cmd.geojson_path,
                          "optional GeoJSON points output");
  add_threads_option(improve_sub, improve_cmd.threads);

  RankShiftCmd rank_shift_cmd;
  auto* rank_shift_sub = app.add_subcommand(
      "rank-shift", "priority-rank change from disadvantage weighting");
  rank_shift_sub->add_option("--zones", rank_shift_cmd.zones_path, "zones CSV")
      ->required();
  add_matrix_options(rank_shift_sub, rank_shift_cmd.matrix);
  add_params_options(rank_shift_sub, rank_shift_cmd.params, true);
  rank_shift_sub->add_option("--mode", rank_shift_cmd.mode_name_str,
                             "drive|walk|bike");
  rank_shift_sub->add_option("--tau", rank_shift_cmd.tau, "threshold, minutes")
      ->required();
  rank_shift_sub->add_option("--basis", rank_shift_cmd.basis_name,
                             "population|workers weighting basis");
  rank_shift_sub->add_option("--lambda", rank_shift_cmd.lambda,
                             "disadvantage-weighting strength (default 1)");
  rank_shift_sub
      ->add_option("--demographics", rank_shift_cmd.demographics_path,
                   "demographics CSV")
      ->required();
  rank_shift_sub->add_option("--region", rank_shift_cmd.region_path,
                             "file with one zone id per line");
  rank_shift_sub
      ->add_option("--out", rank_shift_cmd.out_path, "output CSV (zone_id,rank_shift)")
      ->required();
  add_threads_option(rank_shift_sub, rank_shift_cmd.threads);

  SynthCmd synth_cmd;
  auto* synth_sub =
      app.add_subcommand("synth", "generate a reproducible synthetic city");
  synth_sub->add_option("--layout", synth_cmd.layout_name, "grid|radial");
  synth_sub->add_option("--grid", synth_cmd.grid_spec, "grid size, ROWSxCOLS");
  synth_sub->add_option("--rings", synth_cmd.config.radial_rings,
                        "rings for the radial layout");
  synth_sub->add_option("--per-ring", synth_cmd.config.radial_per_ring,
                        "zones per ring for the radial layout");
  synth_sub->add_option("--spacing", synth_cmd.config.spacing_km,
                        "neighbor spacing, km");
  synth_sub->add_option("--origin-lat", synth_cmd.config.origin_lat,
                        "latitude of the city center");
  synth_sub->add_option("--origin-lon", synth_cmd.config.origin_lon,
                        "longitude of the city center");
  synth_sub->add_option("--population-scale", synth_cmd.config.population_scale,
                        "population at the core");
  synth_sub->add_option("--population-gamma", synth_cmd.config.population_gamma,
                        "population decay per km from the core");
  synth_sub->add_option("--worker-share", synth_cmd.config.worker_share,
                        "workers as a share of population");
  synth_sub->add_option("--opportunity-scale", synth_cmd.config.opportunity_scale,
                        "opportunity count at the core");
  synth_sub->add_option("--opportunity-gamma", synth_cmd.opp_gamma_specs,
                        "per-kind decay, KIND=VALUE (repeatable)");
  synth_sub->add_option("--jitter", synth_cmd.config.jitter,
                        "multiplicative count jitter in [0,1)");
  synth_sub->add_option("--drive-mph", synth_cmd.config.drive_mph, "edge drive speed");
  synth_sub->add_option("--walk-mph", synth_cmd.config.walk_mph, "edge walk speed");
  synth_sub->add_option("--bike-mph", synth_cmd.config.bike_mph, "edge bike speed");
  synth_sub->add_option("--sprawl-edge-removal",
                        synth_cmd.config.sprawl_edge_removal,
                        "edge removal probability factor away from the core");
  synth_sub->add_option("--sprawl-speed-decay", synth_cmd.config.sprawl_speed_decay,
                        "speed reduction factor away from the core");
  synth_sub->add_option("--sedi-gradient", synth_cmd.config.sedi_gradient,
                        "disadvantage core-distance gradient in [0,1]");
  synth_sub->add_option("--seed", synth_cmd.config.seed, "random seed");
  synth_sub->add_option("--max-minutes", synth_cmd.max_minutes,
                        "matrix prune bound, minutes");
  synth_sub->add_option("--modes", synth_cmd.modes, "matrices to emit")
      ->delimiter(',');
  synth_sub->add_option("--out-dir", synth_cmd.out_dir, "output directory");
  synth_sub->add_flag("--write-cache", synth_cmd.write_cache,
                      "also write binary matrix caches");
  add_threads_option(synth_sub, synth_cmd.threads);

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      if (app.get_subcommands().size() > 0) {
        throw CLI::ArgumentMismatch(
            "--config cannot be combined with a subcommand");
      }
      std::vector<std::string> args = args_from_config(config_path);
      std::reverse(args.begin(), args.end());
      app.parse(args);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(fit_sub)) return fit_cmd.run();
    if (app.got_subcommand(access_sub)) return access_cmd.run();
    if (app.got_subcommand(aggregate_sub)) return aggregate_cmd.run();
    if (app.got_subcommand(sweep_sub)) return sweep_cmd.run();
    if (app.got_subcommand(contour_sub)) return contour_cmd.run();
    if (app.got_subcommand(efficiency_sub)) return efficiency_cmd.run();
    if (app.got_subcommand(sedi_sub)) return sedi_cmd.run();
    if (app.got_subcommand(improve_sub)) return improve_cmd.run();
    if (app.got_subcommand(rank_shift_sub)) return rank_shift_cmd.run();
    if (app.got_subcommand(synth_sub)) return synth_cmd.run();
    std::cerr << app.help();
    return 2;
  } catch (const CLI::ParseError& e) {
    // required-flag checks that depend on other flags surface here
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_parse_error() ? 3 : 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
