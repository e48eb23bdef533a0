#include "gravcat/cost_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gravcat {

CostMatrix CostMatrix::from_triplets(Mode mode, double max_threshold,
                                     std::size_t n_zones, TripletBatch t,
                                     const std::string& source_file) {
  if (!(max_threshold > 0.0) || !std::isfinite(max_threshold)) {
    throw Error(ErrorCode::InvalidConfig, "max_threshold must be a positive finite number of minutes");
  }
  const bool has_lines = !t.line.empty();
  auto fail = [&](ErrorCode code, const std::string& msg, std::size_t k) -> void {
    if (has_lines && !source_file.empty()) throw Error(code, msg, source_file, t.line[k]);
    throw Error(code, msg);
  };

  CostMatrix m;
  m.mode_ = mode;
  m.max_threshold_ = max_threshold;
  m.self_minutes_.assign(n_zones, 0.0);
  m.self_stored_.assign(n_zones, 0);
  std::vector<std::uint32_t> self_line(has_lines ? n_zones : 0, 0);

  const std::size_t n = t.size();
  std::vector<std::uint64_t> counts(n_zones + 1, 0);
  std::vector<std::uint8_t> keep(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (t.origin[k] >= n_zones || t.dst[k] >= n_zones) {
      fail(ErrorCode::UnknownZone, "origin or destination index out of range", k);
    }
    const double v = t.minutes[k];
    if (!std::isfinite(v)) fail(ErrorCode::UnparsableNumber, "non-finite travel time", k);
    if (v < 0.0) fail(ErrorCode::NegativeCount, "negative travel time", k);
    if (t.origin[k] == t.dst[k]) {
      // self pairs live beside the rows; they are exempt from pruning
      if (m.self_stored_[t.origin[k]]) {
        fail(ErrorCode::DuplicateZone, "duplicate self pair for origin index " +
             std::to_string(t.origin[k]), k);
      }
      m.self_minutes_[t.origin[k]] = v;
      m.self_stored_[t.origin[k]] = 1;
      if (has_lines) self_line[t.origin[k]] = t.line[k];
      continue;
    }
    if (v > max_threshold) continue;  // prune at ingest
    keep[k] = 1;
    ++counts[t.origin[k] + 1];
  }

  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  const std::uint64_t kept = counts[n_zones];
  m.row_offsets_ = counts;
  m.dst_.resize(kept);
  m.minutes_.resize(kept);
  std::vector<std::uint32_t> lines(has_lines ? kept : 0);

  std::vector<std::uint64_t> cursor(m.row_offsets_.begin(), m.row_offsets_.end() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (!keep[k]) continue;
    const std::uint64_t slot = cursor[t.origin[k]]++;
    m.dst_[slot] = t.dst[k];
    m.minutes_[slot] = t.minutes[k];
    if (has_lines) lines[slot] = t.line[k];
  }

  // per-row sort by destination index == ascending destination id
  std::vector<std::uint32_t> perm;
  for (std::size_t i = 0; i < n_zones; ++i) {
    const std::uint64_t lo = m.row_offsets_[i], hi = m.row_offsets_[i + 1];
    const std::size_t len = static_cast<std::size_t>(hi - lo);
    if (len == 0) continue;
    perm.resize(len);
    std::iota(perm.begin(), perm.end(), 0u);
    const std::uint32_t* dst = m.dst_.data() + lo;
    std::sort(perm.begin(), perm.end(),
              [dst](std::uint32_t a, std::uint32_t b) { return dst[a] < dst[b]; });
    std::vector<std::uint32_t> d2(len);
    std::vector<double> t2(len);
    std::vector<std::uint32_t> l2(has_lines ? len : 0);
    for (std::size_t j = 0; j < len; ++j) {
      d2[j] = m.dst_[lo + perm[j]];
      t2[j] = m.minutes_[lo + perm[j]];
      if (has_lines) l2[j] = lines[lo + perm[j]];
    }
    for (std::size_t j = 1; j < len; ++j) {
      if (d2[j] == d2[j - 1]) {
        const std::string msg = "duplicate pair (" + std::to_string(i) + ", " +
                                std::to_string(d2[j]) + ")";
        if (has_lines && !source_file.empty()) {
          throw Error(ErrorCode::DuplicateZone, msg, source_file,
                      std::max(l2[j], l2[j - 1]));
        }
        throw Error(ErrorCode::DuplicateZone, msg);
      }
    }
    std::copy(d2.begin(), d2.end(), m.dst_.begin() + lo);
    std::copy(t2.begin(), t2.end(), m.minutes_.begin() + lo);
    if (has_lines) std::copy(l2.begin(), l2.end(), lines.begin() + lo);
  }
  return m;
}

CostMatrix CostMatrix::from_parts(Mode mode, double max_threshold,
                                  std::vector<std::uint64_t> row_offsets,
                                  std::vector<std::uint32_t> dst,
                                  std::vector<double> minutes,
                                  std::vector<double> self_minutes,
                                  std::vector<std::uint8_t> self_stored) {
  if (!(max_threshold > 0.0) || !std::isfinite(max_threshold)) {
    throw Error(ErrorCode::InvalidConfig, "max_threshold must be a positive finite number of minutes");
  }
  if (row_offsets.empty() || row_offsets.front() != 0 ||
      row_offsets.back() != dst.size() || dst.size() != minutes.size()) {
    throw Error(ErrorCode::InvalidConfig, "matrix storage sizes are inconsistent");
  }
  const std::size_t n = row_offsets.size() - 1;
  if (self_minutes.size() != n || self_stored.size() != n) {
    throw Error(ErrorCode::InvalidConfig, "matrix storage sizes are inconsistent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) {
      throw Error(ErrorCode::InvalidConfig, "matrix row offsets are not nondecreasing");
    }
    for (std::uint64_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (dst[k] >= n || dst[k] == i) {
        throw Error(ErrorCode::InvalidConfig, "matrix destination index out of place");
      }
      if (k > row_offsets[i] && dst[k] <= dst[k - 1]) {
        throw Error(ErrorCode::InvalidConfig, "matrix row not strictly ascending");
      }
      if (!std::isfinite(minutes[k]) || minutes[k] < 0.0 || minutes[k] > max_threshold) {
        throw Error(ErrorCode::InvalidConfig, "matrix travel time out of range");
      }
    }
    if (!std::isfinite(self_minutes[i]) || self_minutes[i] < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "matrix self time out of range");
    }
  }
  CostMatrix m;
  m.mode_ = mode;
  m.max_threshold_ = max_threshold;
  m.row_offsets_ = std::move(row_offsets);
  m.dst_ = std::move(dst);
  m.minutes_ = std::move(minutes);
  m.self_minutes_ = std::move(self_minutes);
  m.self_stored_ = std::move(self_stored);
  return m;
}

CostMatrix::Transposed CostMatrix::transpose_submatrix(const Region& region) const {
  const std::size_t nz = zone_count();
  // env index -> region position + 1; 0 = outside region
  std::vector<std::uint32_t> pos(nz, 0);
  for (std::uint32_t k = 0; k < region.size(); ++k) pos[region.indices()[k]] = k + 1;

  Transposed out;
  out.col_offsets.assign(region.size() + 1, 0);
  for (std::uint32_t k = 0; k < region.size(); ++k) {
    const std::uint32_t i = region.indices()[k];
    for (std::uint32_t d : row_dst(i)) {
      if (pos[d] != 0) ++out.col_offsets[pos[d]];
    }
  }
  std::partial_sum(out.col_offsets.begin(), out.col_offsets.end(), out.col_offsets.begin());
  out.origin_pos.resize(out.col_offsets.back());
  out.minutes.resize(out.col_offsets.back());
  std::vector<std::uint64_t> cursor(out.col_offsets.begin(), out.col_offsets.end() - 1);
  // region positions iterate in region order; within each destination column
  // the origin list ends up sorted by region position of the origin
  for (std::uint32_t k = 0; k < region.size(); ++k) {
    const std::uint32_t i = region.indices()[k];
    const auto dsts = row_dst(i);
    const auto mins = row_minutes(i);
    for (std::size_t j = 0; j < dsts.size(); ++j) {
      const std::uint32_t p = pos[dsts[j]];
      if (p == 0) continue;
      const std::uint64_t slot = cursor[p - 1]++;
      out.origin_pos[slot] = k;
      out.minutes[slot] = mins[j];
    }
  }
  return out;
}

}  // namespace gravcat
