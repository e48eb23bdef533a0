#include <bit>
#include <cstring>
#include <fstream>

#include "gravcat/io.hpp"

// Cache layout (all integers and doubles little-endian):
//   bytes 0..5   magic "GCAT01"
//   byte  6      mode (0 drive, 1 walk, 2 bike)
//   byte  7      reserved, 0
//   f64          max_threshold
//   u64          n_zones
//   u64          n_entries
//   u64[n+1]     row offsets into the entry arrays
//   u32[e]       destination indices
//   f64[e]       minutes
//   f64[n]       intrazonal minutes
//   u8[n]        1 when the intrazonal time was given explicitly
//   u64          FNV-1a 64 digest of every preceding byte

namespace gravcat {

namespace {

constexpr char kMagic[6] = {'G', 'C', 'A', 'T', '0', '1'};

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw Error(ErrorCode::IoFailure,
                "matrix cache files are little-endian; this platform is not");
  }
}

template <typename T>
void append(std::string& buf, const T* data, std::size_t count) {
  const std::size_t at = buf.size();
  buf.resize(at + count * sizeof(T));
  std::memcpy(buf.data() + at, data, count * sizeof(T));
}

template <typename T>
void append_one(std::string& buf, T value) {
  append(buf, &value, 1);
}

class Reader {
public:
  Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}

  template <typename T>
  T take_one() {
    T value;
    take(&value, 1);
    return value;
  }

  template <typename T>
  void take(T* out, std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    if (bytes > buf_.size() - pos_) {
      throw Error(ErrorCode::IoFailure, "cache file is truncated", path_, 0);
    }
    std::memcpy(out, buf_.data() + pos_, bytes);
    pos_ += bytes;
  }

  std::size_t remaining() const noexcept { return buf_.size() - pos_; }

private:
  const std::string& buf_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_matrix_cache(const std::string& path, const CostMatrix& matrix) {
  require_little_endian();
  const std::size_t n = matrix.zone_count();
  const std::size_t e = matrix.entry_count();

  std::string buf;
  buf.reserve(8 + 8 + 16 + (n + 1) * 8 + e * 12 + n * 9 + 8);
  append(buf, kMagic, sizeof kMagic);
  append_one<std::uint8_t>(buf, static_cast<std::uint8_t>(matrix.mode()));
  append_one<std::uint8_t>(buf, 0);
  append_one<double>(buf, matrix.max_threshold());
  append_one<std::uint64_t>(buf, n);
  append_one<std::uint64_t>(buf, e);

  std::uint64_t offset = 0;
  append_one<std::uint64_t>(buf, offset);
  for (std::uint32_t i = 0; i < n; ++i) {
    offset += matrix.row_dst(i).size();
    append_one<std::uint64_t>(buf, offset);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto row = matrix.row_dst(i);
    append(buf, row.data(), row.size());
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto row = matrix.row_minutes(i);
    append(buf, row.data(), row.size());
  }
  for (std::uint32_t i = 0; i < n; ++i) append_one<double>(buf, matrix.self_minutes(i));
  for (std::uint32_t i = 0; i < n; ++i) {
    append_one<std::uint8_t>(buf, matrix.self_stored(i) ? 1 : 0);
  }
  append_one<std::uint64_t>(buf, fnv1a(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
}

CostMatrix read_matrix_cache(const std::string& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::string buf;
  in.seekg(0, std::ios::end);
  const auto len = in.tellg();
  if (len > 0) {
    buf.resize(static_cast<std::size_t>(len));
    in.seekg(0);
    in.read(buf.data(), len);
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "failed reading '" + path + "'");

  if (buf.size() < sizeof kMagic + 2 + 8 + 16 + 8 + 8) {
    throw Error(ErrorCode::IoFailure, "cache file is truncated", path, 0);
  }
  std::uint64_t stored_digest;
  std::memcpy(&stored_digest, buf.data() + buf.size() - 8, 8);
  const std::uint64_t computed = fnv1a(buf.data(), buf.size() - 8);
  if (stored_digest != computed) {
    throw Error(ErrorCode::IoFailure,
                "cache digest mismatch: stored " + digest_hex(stored_digest) +
                    ", computed " + digest_hex(computed),
                path, 0);
  }

  Reader reader(buf, path);
  char magic[sizeof kMagic];
  reader.take(magic, sizeof kMagic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::IoFailure, "not a matrix cache file (bad magic)", path, 0);
  }
  const auto mode_byte = reader.take_one<std::uint8_t>();
  if (mode_byte >= kModeCount) {
    throw Error(ErrorCode::IoFailure, "cache names an unknown mode", path, 0);
  }
  reader.take_one<std::uint8_t>();  // reserved
  const double max_threshold = reader.take_one<double>();
  const auto n = reader.take_one<std::uint64_t>();
  const auto e = reader.take_one<std::uint64_t>();
  if (n > 0xFFFFFFFFull || e > (std::uint64_t{1} << 40)) {
    throw Error(ErrorCode::IoFailure, "cache header sizes are implausible", path, 0);
  }
  // digest (8 bytes) still sits at the tail of `remaining`
  const std::uint64_t body_bytes = (n + 1) * 8 + e * 12 + n * 9;
  if (reader.remaining() != body_bytes + 8) {
    throw Error(ErrorCode::IoFailure, "cache size does not match its header", path, 0);
  }

  std::vector<std::uint64_t> row_offsets(n + 1);
  std::vector<std::uint32_t> dst(e);
  std::vector<double> minutes(e);
  std::vector<double> self_minutes(n);
  std::vector<std::uint8_t> self_stored(n);
  reader.take(row_offsets.data(), row_offsets.size());
  reader.take(dst.data(), dst.size());
  reader.take(minutes.data(), minutes.size());
  reader.take(self_minutes.data(), self_minutes.size());
  reader.take(self_stored.data(), self_stored.size());

  try {
    return CostMatrix::from_parts(static_cast<Mode>(mode_byte), max_threshold,
                                  std::move(row_offsets), std::move(dst),
                                  std::move(minutes), std::move(self_minutes),
                                  std::move(self_stored));
  } catch (const Error& err) {
    throw Error(ErrorCode::IoFailure,
                std::string("cache contents are inconsistent: ") + err.what(), path, 0);
  }
}

}  // namespace gravcat
