#include "gravcat/opportunity.hpp"

#include <array>
#include <cmath>

namespace gravcat {

std::span<const std::string> default_opportunity_kinds() {
  static const std::vector<std::string> kinds = {
      "jobs_total", "jobs_high", "jobs_low",
      "essential_stores", "primary_services", "leisure"};
  return kinds;
}

OpportunityTable::OpportunityTable(std::size_t n_zones) : n_zones_(n_zones) {
  for (const std::string& name : default_opportunity_kinds()) ensure_kind(name);
}

std::uint32_t OpportunityTable::kind_index(const std::string& name) const {
  auto it = kind_index_.find(name);
  if (it == kind_index_.end()) {
    throw Error(ErrorCode::UnknownKind, "unknown opportunity kind '" + name + "'");
  }
  return it->second;
}

std::uint32_t OpportunityTable::ensure_kind(const std::string& name) {
  auto it = kind_index_.find(name);
  if (it != kind_index_.end()) return it->second;
  if (name.empty()) throw Error(ErrorCode::UnknownKind, "opportunity kind name is empty");
  const auto idx = static_cast<std::uint32_t>(kind_names_.size());
  kind_names_.push_back(name);
  kind_index_.emplace(name, idx);
  counts_.emplace_back(n_zones_, 0.0);
  return idx;
}

void OpportunityTable::set(std::uint32_t zone, std::uint32_t kind, double count) {
  if (!std::isfinite(count) || count < 0.0) {
    throw Error(ErrorCode::NegativeCount, "opportunity count must be finite and >= 0");
  }
  counts_.at(kind).at(zone) = count;
}

void OpportunityTable::add(std::uint32_t zone, std::uint32_t kind, double count) {
  if (!std::isfinite(count) || count < 0.0) {
    throw Error(ErrorCode::NegativeCount, "opportunity count must be finite and >= 0");
  }
  counts_.at(kind).at(zone) += count;
}

}  // namespace gravcat
