#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gravcat {

inline constexpr const char* kToolVersion = "0.1.0";  // keep in step with CMake

/// Provenance stamped into every generated output: tool version, the
/// resolved parameter set, and a digest of each input file. CSV and GeoJSON
/// writers embed it; CSV readers skip the leading comment block it becomes.
struct AuditInfo {
  std::string command;  // e.g. "access --tau 30 ..."
  std::vector<std::pair<std::string, std::string>> params;   // fixed order
  std::vector<std::pair<std::string, std::uint64_t>> inputs; // path, digest
};

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t fnv1a_file(const std::string& path);  // IoFailure when unreadable

std::string digest_hex(std::uint64_t digest);

/// The comment block written at the top of CSV outputs: "# key: value"
/// lines, each ending in '\n'.
std::string audit_comment_block(const AuditInfo& audit);

}  // namespace gravcat
