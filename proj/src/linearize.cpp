#include "spt/linearize.hpp"

#include "spt/error.hpp"

namespace spt {

index_t linearize(std::span<const int> halves) {
  index_t out = 0;
  for (int h : halves) {
    if (h != 1 && h != 2) throw Error(Errc::invalid_argument, "linearize selectors must be 1 or 2");
    out = (out << 1) | (h - 1);
  }
  return out + 1;
}

index_t morton_index(std::span<const index_t> coords, index_t side) {
  if (!is_pow2(side)) throw Error(Errc::invalid_argument, "morton side must be a power of two");
  const int levels = log2_floor(static_cast<std::uint64_t>(side));
  index_t code = 0;
  for (int level = levels - 1; level >= 0; --level) {
    for (index_t c : coords) code = (code << 1) | ((c >> level) & 1);
  }
  return code;
}

std::vector<index_t> morton_coords(index_t code, int count, index_t side) {
  const int levels = log2_floor(static_cast<std::uint64_t>(side));
  std::vector<index_t> coords(static_cast<std::size_t>(count), 0);
  int bit = levels * count - 1;
  for (int level = levels - 1; level >= 0; --level) {
    for (int a = 0; a < count; ++a, --bit) coords[static_cast<std::size_t>(a)] |= ((code >> bit) & 1) << level;
  }
  return coords;
}

RankVector::RankVector(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  std::vector<bool> seen(ranks_.size() + 1, false);
  for (int r : ranks_) {
    if (r < 1 || r > static_cast<int>(ranks_.size()) || seen[static_cast<std::size_t>(r)]) {
      throw Error(Errc::invalid_argument, "rank vector is not a permutation of 1..d");
    }
    seen[static_cast<std::size_t>(r)] = true;
  }
}

RankVector RankVector::identity(int d) {
  std::vector<int> r(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] = i + 1;
  return RankVector(std::move(r));
}

RankVector RankVector::inverse() const {
  std::vector<int> inv(ranks_.size());
  for (std::size_t j = 0; j < ranks_.size(); ++j) inv[static_cast<std::size_t>(ranks_[j] - 1)] = static_cast<int>(j) + 1;
  return RankVector(std::move(inv));
}

}  // namespace spt
