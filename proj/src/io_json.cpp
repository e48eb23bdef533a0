#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gravcat/io.hpp"

namespace gravcat {

namespace {

using ordered_json = nlohmann::ordered_json;

double require_number(const nlohmann::json& obj, const char* key,
                      const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("parameter entry needs a numeric '") + key + "' field",
                path, 0);
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("parameter field '") + key + "' must be finite", path, 0);
  }
  return v;
}

std::string require_string(const nlohmann::json& obj, const char* key,
                           const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("parameter entry needs a string '") + key + "' field",
                path, 0);
  }
  return it->get<std::string>();
}

}  // namespace

ParamsRegistry parse_params_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("invalid JSON: ") + e.what(), path, 0);
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::InvalidConfig,
                "parameter file must be a JSON array of entries", path, 0);
  }
  ParamsRegistry registry;
  for (const auto& entry : doc) {
    if (!entry.is_object()) {
      throw Error(ErrorCode::InvalidConfig, "parameter entry must be a JSON object",
                  path, 0);
    }
    FitResult result;
    const std::string purpose = require_string(entry, "purpose", path);
    const std::string mode_str = require_string(entry, "mode", path);
    Mode mode;
    try {
      mode = mode_from_name(mode_str);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidConfig, "unknown mode '" + mode_str + "'", path, 0);
    }
    const double alpha = require_number(entry, "alpha", path);
    const double beta = require_number(entry, "beta", path);
    if (!(alpha > 0.0) || !(beta > 0.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "alpha and beta must be positive for purpose '" + purpose + "'",
                  path, 0);
    }
    result.params = ImpedanceParams::gravity(alpha, beta, purpose, mode);
    result.r2 = require_number(entry, "r2", path);
    const double n_trips = require_number(entry, "n_trips", path);
    if (n_trips < 0.0 || n_trips != std::floor(n_trips)) {
      throw Error(ErrorCode::InvalidConfig,
                  "n_trips must be a nonnegative integer for purpose '" + purpose + "'",
                  path, 0);
    }
    result.n_trips = static_cast<std::size_t>(n_trips);
    if (registry.contains(purpose, mode)) {
      throw Error(ErrorCode::InvalidConfig,
                  "duplicate entry for purpose '" + purpose + "', mode '" +
                      mode_str + "'",
                  path, 0);
    }
    registry.insert(result);
  }
  return registry;
}

void write_params_json(const std::string& path, const ParamsRegistry& registry) {
  ordered_json doc = ordered_json::array();
  for (const FitResult& result : registry.entries()) {
    ordered_json entry;
    entry["purpose"] = result.params.purpose;
    entry["mode"] = mode_name(result.params.mode);
    entry["alpha"] = result.params.alpha;
    entry["beta"] = result.params.beta;
    entry["r2"] = result.r2;
    entry["n_trips"] = result.n_trips;
    doc.push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
}

void write_points_geojson(
    const std::string& path, const ZoneSet& zones,
    const std::vector<std::string>& ids,
    const std::vector<std::pair<std::string, std::string>>& constants,
    const std::vector<GeoJsonColumn>& columns, const AuditInfo* audit) {
  for (const GeoJsonColumn& col : columns) {
    if (col.values.size() != ids.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "column '" + col.name + "' does not match the id list");
    }
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  if (audit != nullptr) {
    ordered_json meta;
    meta["generator"] = std::string("gravcat ") + kToolVersion;
    meta["command"] = audit->command;
    ordered_json params = ordered_json::object();
    for (const auto& [key, value] : audit->params) params[key] = value;
    meta["params"] = std::move(params);
    ordered_json inputs = ordered_json::array();
    for (const auto& [input_path, digest] : audit->inputs) {
      ordered_json rec;
      rec["path"] = input_path;
      rec["fnv1a"] = digest_hex(digest);
      inputs.push_back(std::move(rec));
    }
    meta["inputs"] = std::move(inputs);
    doc["audit"] = std::move(meta);
  }
  ordered_json features = ordered_json::array();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Zone& zone = zones.at(zones.index_of(ids[k]));
    ordered_json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"},
                           {"coordinates", {zone.centroid_lon, zone.centroid_lat}}};
    ordered_json props;
    props["zone_id"] = ids[k];
    for (const auto& [key, value] : constants) props[key] = value;
    for (const GeoJsonColumn& col : columns) {
      const double v = col.values[k];
      if (std::isfinite(v)) {
        props[col.name] = v;
      } else {
        props[col.name] = nullptr;  // undefined zones serialize as null
      }
    }
    feature["properties"] = std::move(props);
    features.push_back(std::move(feature));
  }
  doc["features"] = std::move(features);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
}

}  // namespace gravcat
