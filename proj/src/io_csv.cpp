#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string_view>
#include <unordered_map>

#include "gravcat/io.hpp"
#include "gravcat/parallel.hpp"

namespace gravcat {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::string out;
  in.seekg(0, std::ios::end);
  const auto len = in.tellg();
  if (len > 0) {
    out.resize(static_cast<std::size_t>(len));
    in.seekg(0);
    in.read(out.data(), len);
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "failed reading '" + path + "'");
  return out;
}

struct DataLine {
  std::string_view text;
  std::size_t number;  // 1-based physical line number
};

/// Splits the file into lines, strips a trailing '\r' per line (CRLF input
/// is tolerated), skips '#' comment lines before the header, and checks the
/// header verbatim. Returns the data lines.
std::vector<DataLine> read_table(const std::string& content, const std::string& path,
                                 std::string_view expected_header) {
  std::vector<DataLine> lines;
  std::size_t pos = 0, number = 0;
  bool have_header = false;
  while (pos < content.size()) {
    const char* start = content.data() + pos;
    const char* nl = static_cast<const char*>(
        std::memchr(start, '\n', content.size() - pos));
    std::size_t len = (nl != nullptr) ? static_cast<std::size_t>(nl - start)
                                      : content.size() - pos;
    ++number;
    std::string_view line(start, len);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos += len + (nl != nullptr ? 1 : 0);

    if (!have_header) {
      if (!line.empty() && line.front() == '#') continue;  // audit comments
      if (line != expected_header) {
        throw Error(ErrorCode::MissingHeader,
                    "expected header '" + std::string(expected_header) + "', found '" +
                        std::string(line) + "'",
                    path, number);
      }
      have_header = true;
      continue;
    }
    if (line.empty()) {
      if (pos >= content.size()) break;  // trailing newline artifact
      throw Error(ErrorCode::BadFieldCount, "blank line inside the table", path, number);
    }
    lines.push_back({line, number});
  }
  if (!have_header) {
    throw Error(ErrorCode::MissingHeader,
                "expected header '" + std::string(expected_header) + "', found end of file",
                path, number == 0 ? 1 : number);
  }
  return lines;
}

/// Splits `line` on commas into exactly `n` fields.
void split_fields(const DataLine& line, const std::string& path,
                  std::string_view* fields, std::size_t n) {
  std::size_t count = 0;
  std::size_t start = 0;
  const std::string_view text = line.text;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (count < n) fields[count] = text.substr(start, i - start);
      ++count;
      start = i + 1;
    }
  }
  if (count != n) {
    throw Error(ErrorCode::BadFieldCount,
                "expected " + std::to_string(n) + " fields, found " +
                    std::to_string(count),
                path, line.number);
  }
}

double parse_number(std::string_view field, const std::string& path,
                    std::size_t line, const char* column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, value);
  // from_chars accepts inf/nan spellings; the schemas do not
  if (res.ec != std::errc{} || res.ptr != end || field.empty() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::UnparsableNumber,
                std::string("column '") + column + "': cannot parse '" +
                    std::string(field) + "' as a finite number",
                path, line);
  }
  return value;
}

double parse_nonnegative(std::string_view field, const std::string& path,
                         std::size_t line, const char* column) {
  const double v = parse_number(field, path, line, column);
  if (v < 0.0) {
    throw Error(ErrorCode::NegativeCount,
                std::string("column '") + column + "' must be >= 0, found " +
                    std::string(field),
                path, line);
  }
  return v;
}

std::string parse_identifier(std::string_view field, const std::string& path,
                             std::size_t line, const char* column) {
  if (field.empty()) {
    throw Error(ErrorCode::UnparsableNumber,
                std::string("column '") + column + "' is empty", path, line);
  }
  return std::string(field);
}

/// Writers refuse identifiers the comma-delimited format cannot represent.
void check_writable_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\r\n") != std::string::npos ||
      id.front() == '#') {
    throw Error(ErrorCode::InvalidConfig,
                "identifier '" + id + "' cannot be written to CSV");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  return out;
}

void write_prefix(std::ofstream& out, const AuditInfo* audit, std::string_view header) {
  if (audit != nullptr) out << audit_comment_block(*audit);
  out << header << "\n";
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
}

}  // namespace

// ---- zones ------------------------------------------------------------------

ZoneSet parse_zones_csv(const std::string& path) {
  const std::string content = read_file(path);
  const auto lines = read_table(content, path, "zone_id,lat,lon,population,workers");
  std::vector<Zone> zones;
  zones.reserve(lines.size());
  std::vector<std::size_t> line_of;  // parallel to zones, for duplicate reports
  line_of.reserve(lines.size());
  for (const DataLine& line : lines) {
    std::string_view f[5];
    split_fields(line, path, f, 5);
    Zone z;
    z.id = parse_identifier(f[0], path, line.number, "zone_id");
    z.centroid_lat = parse_number(f[1], path, line.number, "lat");
    z.centroid_lon = parse_number(f[2], path, line.number, "lon");
    if (!coordinates_valid(z.centroid_lat, z.centroid_lon)) {
      throw Error(ErrorCode::InvalidCoordinate,
                  "centroid (" + std::string(f[1]) + ", " + std::string(f[2]) +
                      ") is out of range",
                  path, line.number);
    }
    z.population = parse_nonnegative(f[3], path, line.number, "population");
    z.workers = parse_nonnegative(f[4], path, line.number, "workers");
    zones.push_back(std::move(z));
    line_of.push_back(line.number);
  }
  // report duplicates with the line of the second occurrence
  {
    std::unordered_map<std::string_view, std::size_t> seen;
    seen.reserve(zones.size());
    for (std::size_t k = 0; k < zones.size(); ++k) {
      const auto [it, fresh] = seen.emplace(zones[k].id, k);
      if (!fresh) {
        throw Error(ErrorCode::DuplicateZone,
                    "zone '" + zones[k].id + "' already defined on line " +
                        std::to_string(line_of[it->second]),
                    path, line_of[k]);
      }
    }
  }
  return ZoneSet(std::move(zones));
}

void write_zones_csv(const std::string& path, const ZoneSet& zones,
                     const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,lat,lon,population,workers");
  for (const Zone& z : zones.zones()) {
    check_writable_id(z.id);
    out << z.id << ',' << format_double(z.centroid_lat) << ','
        << format_double(z.centroid_lon) << ',' << format_double(z.population)
        << ',' << format_double(z.workers) << '\n';
  }
  finish_output(out, path);
}

// ---- opportunities -----------------------------------------------------------

OpportunityTable parse_opportunities_csv(const std::string& path,
                                         const ZoneSet& zones) {
  const std::string content = read_file(path);
  const auto lines = read_table(content, path, "zone_id,kind,count");
  OpportunityTable table(zones.size());
  std::unordered_map<std::uint64_t, std::size_t> seen;  // (zone, kind) -> line
  for (const DataLine& line : lines) {
    std::string_view f[3];
    split_fields(line, path, f, 3);
    const std::string id = parse_identifier(f[0], path, line.number, "zone_id");
    if (!zones.contains(id)) {
      throw Error(ErrorCode::UnknownZone, "zone '" + id + "' is not in the zone table",
                  path, line.number);
    }
    const std::uint32_t zone = zones.index_of(id);
    const std::string kind = parse_identifier(f[1], path, line.number, "kind");
    const double count = parse_nonnegative(f[2], path, line.number, "count");
    const std::uint32_t kind_idx = table.ensure_kind(kind);
    const std::uint64_t key = (static_cast<std::uint64_t>(kind_idx) << 32) | zone;
    const auto [it, fresh] = seen.emplace(key, line.number);
    if (!fresh) {
      throw Error(ErrorCode::DuplicateZone,
                  "count for zone '" + id + "', kind '" + kind +
                      "' already given on line " + std::to_string(it->second),
                  path, line.number);
    }
    table.set(zone, kind_idx, count);
  }
  return table;
}

void write_opportunities_csv(const std::string& path, const OpportunityTable& opps,
                             const ZoneSet& zones, const AuditInfo* audit) {
  if (opps.zone_count() != zones.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "opportunity table does not cover the zone table");
  }
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,kind,count");
  const auto kinds = opps.kind_names();
  for (std::uint32_t zone = 0; zone < zones.size(); ++zone) {
    check_writable_id(zones.at(zone).id);
    for (std::uint32_t kidx = 0; kidx < kinds.size(); ++kidx) {
      check_writable_id(kinds[kidx]);
      const double count = opps.at(zone, kidx);
      if (count == 0.0) continue;  // absent means 0
      out << zones.at(zone).id << ',' << kinds[kidx] << ',' << format_double(count)
          << '\n';
    }
  }
  finish_output(out, path);
}

// ---- matrix -------------------------------------------------------------------

CostMatrix parse_matrix_csv(const std::string& path, const ZoneSet& zones,
                            Mode mode, double max_threshold, int threads) {
  const std::string content = read_file(path);
  const auto lines =
      read_table(content, path, "origin_id,destination_id,minutes");

  // Parsing dominates load time for big matrices, so rows are parsed in
  // parallel chunks; chunk results are concatenated in chunk order and the
  // lowest-line error wins, keeping everything deterministic.
  const int n_threads = resolve_threads(threads);
  constexpr std::size_t kRowsPerChunk = 1024;
  const std::size_t n_chunks = lines.empty() ? 0 : (lines.size() + kRowsPerChunk - 1) / kRowsPerChunk;
  std::vector<TripletBatch> parts(n_chunks);

  parallel_for(n_chunks, n_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t lo = c * kRowsPerChunk;
      const std::size_t hi = std::min(lines.size(), lo + kRowsPerChunk);
      TripletBatch& batch = parts[c];
      batch.origin.reserve(hi - lo);
      batch.dst.reserve(hi - lo);
      batch.minutes.reserve(hi - lo);
      batch.line.reserve(hi - lo);
      for (std::size_t r = lo; r < hi; ++r) {
        std::string_view f[3];
        split_fields(lines[r], path, f, 3);
        const std::string origin = parse_identifier(f[0], path, lines[r].number, "origin_id");
        const std::string dst = parse_identifier(f[1], path, lines[r].number, "destination_id");
        if (!zones.contains(origin)) {
          throw Error(ErrorCode::UnknownZone,
                      "zone '" + origin + "' is not in the zone table", path,
                      lines[r].number);
        }
        if (!zones.contains(dst)) {
          throw Error(ErrorCode::UnknownZone,
                      "zone '" + dst + "' is not in the zone table", path,
                      lines[r].number);
        }
        const double minutes = parse_nonnegative(f[2], path, lines[r].number, "minutes");
        batch.push(zones.index_of(origin), zones.index_of(dst), minutes);
        batch.line.push_back(static_cast<std::uint32_t>(lines[r].number));
      }
    }
  });

  TripletBatch all;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  all.origin.reserve(total);
  all.dst.reserve(total);
  all.minutes.reserve(total);
  all.line.reserve(total);
  for (const auto& part : parts) {
    all.origin.insert(all.origin.end(), part.origin.begin(), part.origin.end());
    all.dst.insert(all.dst.end(), part.dst.begin(), part.dst.end());
    all.minutes.insert(all.minutes.end(), part.minutes.begin(), part.minutes.end());
    all.line.insert(all.line.end(), part.line.begin(), part.line.end());
  }
  return CostMatrix::from_triplets(mode, max_threshold, zones.size(), std::move(all),
                                   path);
}

void write_matrix_csv(const std::string& path, const CostMatrix& matrix,
                      const ZoneSet& zones, const AuditInfo* audit) {
  if (matrix.zone_count() != zones.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix does not cover the zone table");
  }
  auto out = open_output(path);
  write_prefix(out, audit, "origin_id,destination_id,minutes");
  std::string buffer;
  for (std::uint32_t i = 0; i < matrix.zone_count(); ++i) {
    const std::string& origin = zones.at(i).id;
    check_writable_id(origin);
    buffer.clear();
    if (matrix.self_stored(i)) {
      buffer += origin;
      buffer += ',';
      buffer += origin;
      buffer += ',';
      buffer += format_double(matrix.self_minutes(i));
      buffer += '\n';
    }
    const auto ds = matrix.row_dst(i);
    const auto ts = matrix.row_minutes(i);
    for (std::size_t k = 0; k < ds.size(); ++k) {
      buffer += origin;
      buffer += ',';
      buffer += zones.at(ds[k]).id;
      buffer += ',';
      buffer += format_double(ts[k]);
      buffer += '\n';
    }
    out << buffer;
  }
  finish_output(out, path);
}

// ---- trips --------------------------------------------------------------------

std::vector<TripRecord> parse_trips_csv(const std::string& path) {
  const std::string content = read_file(path);
  // two admissible headers: with and without the weight column
  bool with_weights = true;
  std::vector<DataLine> lines;
  try {
    lines = read_table(content, path, "mode,purpose,duration_min,weight");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingHeader) throw;
    lines = read_table(content, path, "mode,purpose,duration_min");
    with_weights = false;
  }
  std::vector<TripRecord> out;
  out.reserve(lines.size());
  for (const DataLine& line : lines) {
    std::string_view f[4];
    split_fields(line, path, f, with_weights ? 4 : 3);
    TripRecord rec;
    const std::string mode_str = parse_identifier(f[0], path, line.number, "mode");
    try {
      rec.mode = mode_from_name(mode_str);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidConfig,
                  "column 'mode': unknown mode '" + mode_str + "'", path, line.number);
    }
    rec.purpose = parse_identifier(f[1], path, line.number, "purpose");
    rec.duration_min = parse_number(f[2], path, line.number, "duration_min");
    if (!(rec.duration_min > 0.0)) {
      throw Error(ErrorCode::InvalidDuration, "column 'duration_min' must be > 0",
                  path, line.number);
    }
    if (with_weights) {
      rec.weight = parse_number(f[3], path, line.number, "weight");
      if (!(rec.weight > 0.0)) {
        throw Error(ErrorCode::NegativeCount, "column 'weight' must be > 0", path,
                    line.number);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_trips_csv(const std::string& path, const std::vector<TripRecord>& trips,
                     bool with_weights, const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit,
               with_weights ? "mode,purpose,duration_min,weight"
                            : "mode,purpose,duration_min");
  for (const TripRecord& rec : trips) {
    check_writable_id(rec.purpose);
    out << mode_name(rec.mode) << ',' << rec.purpose << ','
        << format_double(rec.duration_min);
    if (with_weights) out << ',' << format_double(rec.weight);
    out << '\n';
  }
  finish_output(out, path);
}

// ---- demographics -------------------------------------------------------------

SediFactors parse_demographics_csv(const std::string& path, const ZoneSet& zones) {
  const std::string content = read_file(path);
  const auto lines = read_table(
      content, path,
      "zone_id,poverty,minority,unemployment,low_education,zero_vehicle,single_parent");
  SediFactors factors(zones.size());
  std::vector<std::size_t> first_line(zones.size(), 0);
  for (const DataLine& line : lines) {
    std::string_view f[1 + kSediFactorCount];
    split_fields(line, path, f, 1 + kSediFactorCount);
    const std::string id = parse_identifier(f[0], path, line.number, "zone_id");
    if (!zones.contains(id)) {
      throw Error(ErrorCode::UnknownZone, "zone '" + id + "' is not in the zone table",
                  path, line.number);
    }
    const std::uint32_t zone = zones.index_of(id);
    if (first_line[zone] != 0) {
      throw Error(ErrorCode::DuplicateZone,
                  "zone '" + id + "' already given on line " +
                      std::to_string(first_line[zone]),
                  path, line.number);
    }
    first_line[zone] = line.number;
    std::array<double, kSediFactorCount> row;
    for (std::size_t k = 0; k < kSediFactorCount; ++k) {
      row[k] = parse_number(f[1 + k], path, line.number, kSediFactorNames[k]);
    }
    factors.set_zone(zone, row);
  }
  return factors;
}

void write_demographics_csv(const std::string& path, const SediFactors& factors,
                            const ZoneSet& zones, const AuditInfo* audit) {
  if (factors.zone_count() != zones.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "factor table does not cover the zone table");
  }
  auto out = open_output(path);
  write_prefix(
      out, audit,
      "zone_id,poverty,minority,unemployment,low_education,zero_vehicle,single_parent");
  for (std::uint32_t zone = 0; zone < zones.size(); ++zone) {
    if (!factors.complete[zone]) continue;
    check_writable_id(zones.at(zone).id);
    out << zones.at(zone).id;
    for (std::size_t f = 0; f < kSediFactorCount; ++f) {
      out << ',' << format_double(factors.values[f][zone]);
    }
    out << '\n';
  }
  finish_output(out, path);
}

// ---- results ------------------------------------------------------------------

std::vector<ResultRow> parse_results_csv(const std::string& path) {
  const std::string content = read_file(path);
  const auto lines = read_table(content, path, "zone_id,kind,mode,tau,value");
  std::vector<ResultRow> out;
  out.reserve(lines.size());
  for (const DataLine& line : lines) {
    std::string_view f[5];
    split_fields(line, path, f, 5);
    ResultRow row;
    row.zone_id = parse_identifier(f[0], path, line.number, "zone_id");
    row.kind = parse_identifier(f[1], path, line.number, "kind");
    const std::string mode_str = parse_identifier(f[2], path, line.number, "mode");
    try {
      row.mode = mode_from_name(mode_str);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidConfig,
                  "column 'mode': unknown mode '" + mode_str + "'", path, line.number);
    }
    row.tau = parse_number(f[3], path, line.number, "tau");
    row.value = parse_number(f[4], path, line.number, "value");
    out.push_back(std::move(row));
  }
  return out;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows,
                       const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,kind,mode,tau,value");
  for (const ResultRow& row : rows) {
    check_writable_id(row.zone_id);
    check_writable_id(row.kind);
    out << row.zone_id << ',' << row.kind << ',' << mode_name(row.mode) << ','
        << format_double(row.tau) << ',' << format_double(row.value) << '\n';
  }
  finish_output(out, path);
}

// ---- analysis-specific tables ---------------------------------------------------

void write_sedi_csv(const std::string& path, const SediTable& table,
                    const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,sedi");
  for (std::size_t k = 0; k < table.ids.size(); ++k) {
    check_writable_id(table.ids[k]);
    out << table.ids[k] << ',' << format_double(table.index[k]) << '\n';
  }
  finish_output(out, path);
}

void write_improvement_csv(const std::string& path,
                           const ImprovementPotential& potential,
                           const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,gradient,rank,weighting");
  for (std::size_t k = 0; k < potential.ids.size(); ++k) {
    check_writable_id(potential.ids[k]);
    out << potential.ids[k] << ',' << format_double(potential.gradient[k]) << ','
        << potential.rank[k] << ',' << potential.weighting << '\n';
  }
  finish_output(out, path);
}

void write_rank_shift_csv(const std::string& path, const RankShift& shift,
                          const AuditInfo* audit) {
  auto out = open_output(path);
  write_prefix(out, audit, "zone_id,rank_shift");
  for (std::size_t k = 0; k < shift.ids.size(); ++k) {
    check_writable_id(shift.ids[k]);
    out << shift.ids[k] << ',' << shift.shift[k] << '\n';
  }
  finish_output(out, path);
}

}  // namespace gravcat
