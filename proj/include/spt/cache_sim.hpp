#pragma once

#include <cstdint>
#include <list>
#include <span>
#include <string>
#include <unordered_map>

#include "spt/engine.hpp"
#include "spt/task.hpp"

namespace spt {

/// Ideal-cache parameters. `alpha` is the base-case fitting constant used by
/// the analytic predictions ("subproblem fits when footprint <= alpha*M").
struct CacheConfig {
  std::int64_t capacity = 1024;  // M, words
  std::int64_t line = 8;         // B, words
  double alpha = 1.0;
  bool require_tall = true;

  std::int64_t lines() const { return capacity / line; }
  /// Throws Error(config) unless M >= B >= 1 and, when required, M >= B^2.
  void validate() const;
};

/// Fully associative LRU cache of M/B lines. Lines never straddle buffers:
/// element i of buffer b lives in line (b, i / B).
class LruCache final : public AccessSink {
 public:
  explicit LruCache(const CacheConfig& cfg);

  void on_access(buffer_id buffer, std::uint64_t index, bool write) override;

  std::int64_t misses() const { return misses_; }
  std::int64_t accesses() const { return accesses_; }

 private:
  using LineKey = std::uint64_t;

  CacheConfig cfg_;
  std::size_t capacity_lines_;
  std::list<LineKey> order_;  // front = most recently used
  std::unordered_map<LineKey, std::list<LineKey>::iterator> where_;
  std::int64_t misses_ = 0;
  std::int64_t accesses_ = 0;
};

/// Serial cache complexity Q1 of a recorded trace.
std::int64_t simulate(std::span<const Access> trace, const CacheConfig& cfg);

/// Number of distinct (buffer, line) pairs touched: the cold-miss floor.
std::int64_t distinct_lines(std::span<const Access> trace, std::int64_t line);

/// Binary trace files: little-endian records of u32 buffer id, u64 element
/// index, u8 flag (1 = write), 13 bytes each, no header.
void write_trace_file(const std::string& path, std::span<const Access> trace);
std::vector<Access> read_trace_file(const std::string& path);

}  // namespace spt
