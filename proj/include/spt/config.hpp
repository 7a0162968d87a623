#pragma once

#include <cstdint>

namespace spt {

using index_t = std::int64_t;

/// Knobs shared by every kernel builder.
struct KernelConfig {
  /// Square/rectangular MM recursion stops once every dimension is <= this.
  index_t mm_base = 8;
  /// Data block size B used by the reducers (and by default the cache line).
  index_t block = 8;
  /// Tensor contraction recursion stops once |X|+|U|+|V| of a sub-problem is <= this.
  index_t tc_base = 512;
  /// Testing hook: hand both halves of a plane range to the same sub-range,
  /// producing a deliberate write-write race in the hybrid static kernels.
  bool inject_plane_overlap = false;
};

constexpr bool is_pow2(index_t v) { return v > 0 && (v & (v - 1)) == 0; }

constexpr int log2_floor(std::uint64_t v) {
  int r = -1;
  while (v != 0) {
    v >>= 1;
    ++r;
  }
  return r;
}

constexpr int log2_ceil(std::uint64_t v) {
  return v <= 1 ? 0 : log2_floor(v - 1) + 1;
}

constexpr index_t floor_pow2(index_t v) { return v <= 0 ? 0 : index_t{1} << log2_floor(static_cast<std::uint64_t>(v)); }

constexpr index_t ipow(index_t base, int exp) {
  index_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace spt
