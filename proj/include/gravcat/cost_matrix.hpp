#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gravcat/errors.hpp"
#include "gravcat/zone.hpp"

namespace gravcat {

/// Column-oriented batch of (origin, destination, minutes) records, with an
/// optional parallel array of source line numbers for file-grade errors.
struct TripletBatch {
  std::vector<std::uint32_t> origin;
  std::vector<std::uint32_t> dst;
  std::vector<double> minutes;
  std::vector<std::uint32_t> line;  // empty, or same length as origin

  std::size_t size() const noexcept { return origin.size(); }
  void push(std::uint32_t o, std::uint32_t d, double t) {
    origin.push_back(o);
    dst.push_back(d);
    minutes.push_back(t);
  }
};

/// Sparse interzonal travel-time table for one mode, compressed-row layout.
/// Every stored off-diagonal time is <= max_threshold (pruned at ingest);
/// a missing pair means the travel time exceeds the prune bound. Rows are
/// sorted ascending by destination index, i.e. ascending destination id.
/// Self pairs are kept out of the rows: t_ii defaults to 0 and is stored
/// separately when a file provides it explicitly. Immutable once built.
class CostMatrix {
public:
  CostMatrix() = default;

  static CostMatrix from_triplets(Mode mode, double max_threshold,
                                  std::size_t n_zones, TripletBatch triplets,
                                  const std::string& source_file = {});

  /// Reassembles a matrix from already-sorted storage (the binary cache
  /// path). Revalidates every structural invariant; InvalidConfig when the
  /// parts are inconsistent.
  static CostMatrix from_parts(Mode mode, double max_threshold,
                               std::vector<std::uint64_t> row_offsets,
                               std::vector<std::uint32_t> dst,
                               std::vector<double> minutes,
                               std::vector<double> self_minutes,
                               std::vector<std::uint8_t> self_stored);

  Mode mode() const noexcept { return mode_; }
  double max_threshold() const noexcept { return max_threshold_; }
  std::size_t zone_count() const noexcept { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t entry_count() const noexcept { return dst_.size(); }

  std::span<const std::uint32_t> row_dst(std::uint32_t origin) const {
    return {dst_.data() + row_offsets_[origin], dst_.data() + row_offsets_[origin + 1]};
  }
  std::span<const double> row_minutes(std::uint32_t origin) const {
    return {minutes_.data() + row_offsets_[origin], minutes_.data() + row_offsets_[origin + 1]};
  }

  double self_minutes(std::uint32_t zone) const { return self_minutes_[zone]; }
  bool self_stored(std::uint32_t zone) const { return self_stored_[zone] != 0; }

  /// Rows of the square submatrix restricted to `region`, transposed:
  /// for each region position k, the origins (as region positions) that can
  /// reach region zone k, with their travel times, sorted by origin index.
  struct Transposed {
    std::vector<std::uint64_t> col_offsets;   // region.size()+1
    std::vector<std::uint32_t> origin_pos;    // region position of the origin
    std::vector<double> minutes;
  };
  Transposed transpose_submatrix(const Region& region) const;

private:
  Mode mode_ = Mode::drive;
  double max_threshold_ = 0.0;
  std::vector<std::uint64_t> row_offsets_;
  std::vector<std::uint32_t> dst_;
  std::vector<double> minutes_;
  std::vector<double> self_minutes_;
  std::vector<std::uint8_t> self_stored_;
};

}  // namespace gravcat
