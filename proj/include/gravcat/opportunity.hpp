#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gravcat/errors.hpp"

namespace gravcat {

/// Names of the opportunity kinds every table starts with.
std::span<const std::string> default_opportunity_kinds();

/// Per-zone opportunity counts, one dense vector per registered kind,
/// indexed by environment zone index. Absent entries are 0. Kinds beyond
/// the defaults are registered on first use and kept in registration order.
class OpportunityTable {
public:
  OpportunityTable() = default;
  explicit OpportunityTable(std::size_t n_zones);

  std::size_t zone_count() const noexcept { return n_zones_; }
  std::size_t kind_count() const noexcept { return kind_names_.size(); }
  std::span<const std::string> kind_names() const noexcept { return kind_names_; }

  bool has_kind(const std::string& name) const { return kind_index_.count(name) != 0; }
  std::uint32_t kind_index(const std::string& name) const;  // UnknownKind if absent
  std::uint32_t ensure_kind(const std::string& name);       // registers when new

  /// count must be finite and >= 0; NegativeCount otherwise.
  void set(std::uint32_t zone, std::uint32_t kind, double count);
  void add(std::uint32_t zone, std::uint32_t kind, double count);

  double at(std::uint32_t zone, std::uint32_t kind) const { return counts_[kind][zone]; }
  std::span<const double> counts(std::uint32_t kind) const { return counts_.at(kind); }

private:
  std::size_t n_zones_ = 0;
  std::vector<std::string> kind_names_;
  std::unordered_map<std::string, std::uint32_t> kind_index_;
  std::vector<std::vector<double>> counts_;  // [kind][zone]
};

}  // namespace gravcat
