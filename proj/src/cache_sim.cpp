#include "spt/cache_sim.hpp"

#include <unordered_set>

#include "spt/error.hpp"

namespace spt {

void CacheConfig::validate() const {
  if (line < 1) throw Error(Errc::config, "cache line size must be positive");
  if (capacity < line) throw Error(Errc::config, "cache capacity M must be at least one line B");
  if (require_tall && capacity < line * line) throw Error(Errc::config, "tall cache requires M >= B^2");
  if (!(alpha > 0.0)) throw Error(Errc::config, "alpha must be positive");
}

LruCache::LruCache(const CacheConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  capacity_lines_ = static_cast<std::size_t>(cfg_.lines());
  where_.reserve(capacity_lines_ * 2);
}

void LruCache::on_access(buffer_id buffer, std::uint64_t index, bool /*write*/) {
  ++accesses_;
  const LineKey key = (LineKey{buffer} << 40) | (index / static_cast<std::uint64_t>(cfg_.line));
  auto it = where_.find(key);
  if (it != where_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  ++misses_;
  if (order_.size() == capacity_lines_) {
    where_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(key);
  where_.emplace(key, order_.begin());
}

std::int64_t simulate(std::span<const Access> trace, const CacheConfig& cfg) {
  LruCache cache(cfg);
  for (const Access& a : trace) cache.on_access(a.buffer, a.index, a.write);
  return cache.misses();
}

std::int64_t distinct_lines(std::span<const Access> trace, std::int64_t line) {
  if (line < 1) throw Error(Errc::config, "cache line size must be positive");
  std::unordered_set<std::uint64_t> seen;
  for (const Access& a : trace) {
    seen.insert((std::uint64_t{a.buffer} << 40) | (a.index / static_cast<std::uint64_t>(line)));
  }
  return static_cast<std::int64_t>(seen.size());
}

}  // namespace spt
