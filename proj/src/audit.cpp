#include "gravcat/audit.hpp"

#include <cstdio>
#include <fstream>

#include "gravcat/errors.hpp"

namespace gravcat {

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string audit_comment_block(const AuditInfo& audit) {
  std::string out;
  out += "# gravcat ";
  out += kToolVersion;
  out += "\n";
  if (!audit.command.empty()) {
    out += "# command: " + audit.command + "\n";
  }
  for (const auto& [key, value] : audit.params) {
    out += "# param " + key + ": " + value + "\n";
  }
  for (const auto& [path, digest] : audit.inputs) {
    out += "# input " + path + " fnv1a=" + digest_hex(digest) + "\n";
  }
  return out;
}

}  // namespace gravcat
