#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spt/cache_sim.hpp"
#include "spt/engine.hpp"
#include "spt/mm.hpp"
#include "support.hpp"

namespace spt {
namespace {

CacheConfig cache(std::int64_t m, std::int64_t b) {
  CacheConfig c;
  c.capacity = m;
  c.line = b;
  return c;
}

std::vector<Access> mm_trace(index_t n, const KernelConfig& cfg) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, n, n), u = make_matrix<ModP>(ws, n, n), v = make_matrix<ModP>(ws, n, n);
  auto p = mm_program(x, u, v, cfg);
  TraceRecorder rec;
  run_instrumented(p, &rec);
  return rec.take();
}

TEST(Cache, RepeatedAddressMissesOnce) {
  const std::vector<Access> t(3, Access{0, 17, false});
  EXPECT_EQ(simulate(t, cache(64, 8)), 1);
}

TEST(Cache, ColdMissesOnlyWhenEverythingFits) {
  std::vector<Access> t;
  for (int pass = 0; pass < 3; ++pass)
    for (std::uint64_t i = 0; i < 64; ++i) t.push_back(Access{0, i, false});
  EXPECT_EQ(simulate(t, cache(64, 8)), 8);
  EXPECT_EQ(distinct_lines(t, 8), 8);
}

TEST(Cache, BuffersNeverShareLines) {
  const std::vector<Access> t{{0, 0, false}, {1, 0, false}, {0, 1, false}, {1, 1, false}};
  EXPECT_EQ(simulate(t, cache(64, 8)), 2);
}

TEST(Cache, LruEvictsLeastRecent) {
  // two lines fit; touching 0,1,0,2,1 evicts line 1 before its reuse
  std::vector<Access> t;
  for (std::uint64_t line : {0, 1, 0, 2, 1}) t.push_back(Access{0, line * 4, false});
  EXPECT_EQ(simulate(t, [] {
              CacheConfig c = cache(8, 4);
              c.require_tall = false;
              return c;
            }()),
            4);
}

TEST(Cache, RejectsShortCache) {
  EXPECT_THROW(cache(32, 8).validate(), Error);
  EXPECT_THROW(cache(64, 0).validate(), Error);
  CacheConfig c = cache(32, 8);
  c.require_tall = false;
  EXPECT_NO_THROW(c.validate());
}

TEST(Cache, MonotoneInCapacityAndAboveColdFloor) {
  KernelConfig cfg;
  cfg.mm_base = 2;
  const auto t = mm_trace(16, cfg);
  std::int64_t prev = -1;
  for (std::int64_t m : {1024, 512, 256, 128, 64}) {
    const std::int64_t q = simulate(t, cache(m, 8));
    EXPECT_GE(q, distinct_lines(t, 8));
    if (prev >= 0) {
      EXPECT_GE(q, prev) << m;
    }
    prev = q;
  }
}

TEST(Cache, MmMissRatioFollowsRootM) {
  KernelConfig cfg;
  cfg.mm_base = 2;
  const auto t = mm_trace(16, cfg);
  const double ratio = static_cast<double>(simulate(t, cache(256, 4))) / static_cast<double>(simulate(t, cache(1024, 4)));
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 2.5);
}

TEST(Cache, StreamingMissesHalveWhenLineDoubles) {
  std::vector<Access> t;
  for (std::uint64_t i = 0; i < 4096; ++i) t.push_back(Access{0, i, false});
  EXPECT_EQ(simulate(t, cache(256, 8)) * 2, simulate(t, cache(256, 4)));
}

TEST(Cache, TraceFileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "spt_trace_roundtrip.bin").string();
  const std::vector<Access> t{{0, 1, false}, {3, 99, true}, {1, 0, false}};
  write_trace_file(path, t);
  EXPECT_EQ(read_trace_file(path), t);
  std::filesystem::remove(path);
  EXPECT_THROW(read_trace_file(path), Error);
}

TEST(Cache, TruncatedTraceRejected) {
  const auto path = (std::filesystem::temp_directory_path() / "spt_trace_bad.bin").string();
  const std::vector<Access> t{{0, 1, false}, {3, 99, true}};
  write_trace_file(path, t);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(read_trace_file(path), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace spt
