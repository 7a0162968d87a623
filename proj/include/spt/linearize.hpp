#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spt/config.hpp"

namespace spt {

/// Maps half selectors b_1..b_k (each 1 or 2, b_1 most significant) to
/// 1 + sum_j (b_j - 1) * 2^(k-j).
index_t linearize(std::span<const int> halves);

/// 0-based counterpart over a bitmask: bit a of `mask` is axis a's half,
/// axes [first, first+count) are read with `first` most significant.
inline std::uint32_t linearize_bits(std::uint32_t mask, int first, int count) {
  std::uint32_t out = 0;
  for (int a = first; a < first + count; ++a) out = (out << 1) | ((mask >> a) & 1u);
  return out;
}

/// Composite Morton index of a tuple of coordinates in [0, side): each level
/// contributes one linearize() digit, coarsest level first.
index_t morton_index(std::span<const index_t> coords, index_t side);

/// Inverse of morton_index.
std::vector<index_t> morton_coords(index_t code, int count, index_t side);

/// A permutation r_1..r_d of 1..d.
class RankVector {
 public:
  RankVector() = default;
  explicit RankVector(std::vector<int> ranks);

  static RankVector identity(int d);

  int size() const { return static_cast<int>(ranks_.size()); }
  /// 1-based rank of axis `axis` (0-based).
  int operator[](int axis) const { return ranks_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& ranks() const { return ranks_; }
  RankVector inverse() const;

  friend bool operator==(const RankVector&, const RankVector&) = default;

 private:
  std::vector<int> ranks_;
};

}  // namespace spt
