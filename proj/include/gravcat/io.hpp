#pragma once

#include <string>
#include <vector>

#include "gravcat/access.hpp"
#include "gravcat/audit.hpp"
#include "gravcat/cost_matrix.hpp"
#include "gravcat/equity.hpp"
#include "gravcat/impedance.hpp"
#include "gravcat/opportunity.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

// All CSV files are UTF-8, comma-delimited, '.' decimal separator, one
// mandatory header row. Lines starting with '#' before the header are
// comments (this is where generated files carry their audit block). Errors
// report the 1-based physical line number of the offending line. Floats are
// written with shortest round-trip formatting, so parse(write(x)) == x.

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

// ---- zones.csv: zone_id,lat,lon,population,workers
ZoneSet parse_zones_csv(const std::string& path);
void write_zones_csv(const std::string& path, const ZoneSet& zones,
                     const AuditInfo* audit = nullptr);

// ---- opportunities.csv: zone_id,kind,count
OpportunityTable parse_opportunities_csv(const std::string& path,
                                         const ZoneSet& zones);
void write_opportunities_csv(const std::string& path,
                             const OpportunityTable& opps, const ZoneSet& zones,
                             const AuditInfo* audit = nullptr);

// ---- matrix.csv: origin_id,destination_id,minutes
// Self pairs are optional; when present they set the zone's intrazonal time.
CostMatrix parse_matrix_csv(const std::string& path, const ZoneSet& zones,
                            Mode mode, double max_threshold, int threads = 0);
void write_matrix_csv(const std::string& path, const CostMatrix& matrix,
                      const ZoneSet& zones, const AuditInfo* audit = nullptr);

// ---- trips.csv: mode,purpose,duration_min  (optional 4th column: weight)
std::vector<TripRecord> parse_trips_csv(const std::string& path);
void write_trips_csv(const std::string& path, const std::vector<TripRecord>& trips,
                     bool with_weights, const AuditInfo* audit = nullptr);

// ---- demographics.csv:
// zone_id,poverty,minority,unemployment,low_education,zero_vehicle,single_parent
SediFactors parse_demographics_csv(const std::string& path, const ZoneSet& zones);
void write_demographics_csv(const std::string& path, const SediFactors& factors,
                            const ZoneSet& zones, const AuditInfo* audit = nullptr);

// ---- params.json: array of {purpose, mode, alpha, beta, r2, n_trips}.
// The array layout is the interchange contract, so no audit wrapper is added.
ParamsRegistry parse_params_json(const std::string& path);
void write_params_json(const std::string& path, const ParamsRegistry& registry);

// ---- results: zone_id,kind,mode,tau,value
struct ResultRow {
  std::string zone_id;
  std::string kind;
  Mode mode = Mode::drive;
  double tau = 0.0;
  double value = 0.0;
};
std::vector<ResultRow> parse_results_csv(const std::string& path);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows,
                       const AuditInfo* audit = nullptr);

/// GeoJSON FeatureCollection of zone-centroid Points. `constants` become
/// properties shared by every feature, `columns` per-feature numeric
/// properties aligned with `ids`. The audit block lands in a top-level
/// foreign member.
struct GeoJsonColumn {
  std::string name;
  std::vector<double> values;
};
void write_points_geojson(
    const std::string& path, const ZoneSet& zones,
    const std::vector<std::string>& ids,
    const std::vector<std::pair<std::string, std::string>>& constants,
    const std::vector<GeoJsonColumn>& columns, const AuditInfo* audit = nullptr);

// ---- small analysis-specific tables
void write_sedi_csv(const std::string& path, const SediTable& table,
                    const AuditInfo* audit = nullptr);
void write_improvement_csv(const std::string& path,
                           const ImprovementPotential& potential,
                           const AuditInfo* audit = nullptr);
void write_rank_shift_csv(const std::string& path, const RankShift& shift,
                          const AuditInfo* audit = nullptr);

// ---- binary matrix cache (magic GCAT01, little-endian; see README for the
// exact byte layout). Much faster to load than the CSV on repeated runs.
CostMatrix read_matrix_cache(const std::string& path);
void write_matrix_cache(const std::string& path, const CostMatrix& matrix);

}  // namespace gravcat
