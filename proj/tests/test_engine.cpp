#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include "spt/engine.hpp"
#include "spt/mm.hpp"
#include "spt/rmm.hpp"
#include "spt/tc.hpp"
#include "support.hpp"

namespace spt {
namespace {

using test::unit_leaf;
using test::unit_leaves;

TEST(Engine, ForkOfFourUnitLeaves) {
  const auto m = analyze(Task::fork(unit_leaves(4)));
  EXPECT_EQ(m.span, 5);
  EXPECT_EQ(m.work, 4 + 2 * 3);
  EXPECT_EQ(m.forks, 3);
}

TEST(Engine, SequenceOfThreeUnitLeaves) {
  const auto m = analyze(Task::sequence(unit_leaves(3)));
  EXPECT_EQ(m.span, 3);
  EXPECT_EQ(m.work, 3);
}

TEST(Engine, ParallelForUsesOneWayTree) {
  const auto m = analyze(Task::parallel_for(unit_leaves(8)));
  EXPECT_EQ(m.span, 1 + 3);
  EXPECT_EQ(m.work, 8 + 7);
}

TEST(Engine, ForkSpanFollowsLongestChild) {
  for (int k = 1; k <= 9; ++k) {
    std::vector<Task> kids = unit_leaves(k - 1);
    kids.push_back(Task::sequence(unit_leaves(5)));
    const auto m = analyze(Task::fork(std::move(kids)));
    EXPECT_EQ(m.span, 5 + 2 * log2_ceil(static_cast<std::uint64_t>(k))) << k;
  }
}

TEST(Engine, CallAddsUnitOverhead) {
  const auto m = analyze(Task::sequence(unit_leaves(2)).as_call());
  EXPECT_EQ(m.span, 3);
  EXPECT_EQ(m.work, 3);
}

TEST(Engine, AllocationTracksPeakSpace) {
  Workspace ws;
  auto* a = ws.create<ModP>(100, "a", false);
  auto* b = ws.create<ModP>(50, "b", false);
  std::vector<Task> seq;
  seq.push_back(Task::alloc(a));
  seq.push_back(Task::dealloc(a));
  seq.push_back(Task::alloc(b));
  seq.push_back(Task::dealloc(b));
  const auto serial = analyze(Task::sequence(std::move(seq)));
  EXPECT_EQ(serial.peak_space, 100);
  EXPECT_EQ(serial.work, 7 + 1 + 6 + 1);

  std::vector<Task> left, right, both;
  left.push_back(Task::alloc(a));
  left.push_back(Task::dealloc(a));
  right.push_back(Task::alloc(b));
  right.push_back(Task::dealloc(b));
  both.push_back(Task::sequence(std::move(left)));
  both.push_back(Task::sequence(std::move(right)));
  EXPECT_EQ(analyze(Task::fork(std::move(both))).peak_space, 150);
}

TEST(Engine, EmptyTreeDoesNothing) {
  Program p;
  const auto m = run_instrumented(p);
  EXPECT_EQ(m.work, 0);
  EXPECT_EQ(m.span, 0);
  EXPECT_TRUE(check_race_freedom(p).ok());
  EXPECT_NO_THROW(run_parallel(p, 1));
}

TEST(Engine, MmLeafWorkIsCubeOfSide) {
  Workspace ws;
  for (index_t n : {1, 2, 4, 8}) {
    auto x = make_matrix<ModP>(ws, n, n), u = make_matrix<ModP>(ws, n, n), v = make_matrix<ModP>(ws, n, n);
    KernelConfig cfg;
    cfg.mm_base = n;
    auto p = mm_program(x, u, v, cfg);
    EXPECT_EQ(run_instrumented(p).madds, n * n * n);
  }
}

TEST(Race, DetectsTwoWritersUnderFork) {
  std::vector<Task> kids;
  kids.push_back(unit_leaf({{0, 5, true}}));
  kids.push_back(unit_leaf({{0, 6, true}}));
  kids.push_back(unit_leaf({{0, 5, true}}));
  Program p;
  p.root = Task::fork(std::move(kids));
  const auto rep = check_race_freedom(p);
  ASSERT_FALSE(rep.ok());
  EXPECT_TRUE(rep.violation->path.empty());
  EXPECT_EQ(rep.violation->first_child, 0);
  EXPECT_EQ(rep.violation->second_child, 2);
  EXPECT_EQ(rep.violation->index, 5u);
  EXPECT_TRUE(rep.violation->write_write);
}

TEST(Race, ReadWriteConflictReported) {
  std::vector<Task> kids;
  kids.push_back(unit_leaf({{1, 0, false}}));
  kids.push_back(unit_leaf({{1, 0, true}}));
  Program p;
  p.root = Task::parallel_for(std::move(kids));
  const auto rep = check_race_freedom(p);
  ASSERT_FALSE(rep.ok());
  EXPECT_FALSE(rep.violation->write_write);
}

TEST(Race, SequenceAndSharedReadsAreFine) {
  std::vector<Task> seq;
  seq.push_back(unit_leaf({{0, 1, true}}));
  seq.push_back(unit_leaf({{0, 1, true}}));
  std::vector<Task> kids;
  kids.push_back(Task::sequence(std::move(seq)));
  kids.push_back(unit_leaf({{1, 1, false}}));
  kids.push_back(unit_leaf({{1, 1, false}}));
  Program p;
  p.root = Task::fork(std::move(kids));
  EXPECT_TRUE(check_race_freedom(p).ok());
}

TEST(Race, NestedViolationPath) {
  std::vector<Task> inner;
  inner.push_back(unit_leaf({{2, 3, true}}));
  inner.push_back(unit_leaf({{2, 3, true}}));
  std::vector<Task> outer;
  outer.push_back(unit_leaf());
  outer.push_back(Task::fork(std::move(inner)).tagged({"probe"}));
  Program p;
  p.root = Task::sequence(std::move(outer));
  const auto rep = check_race_freedom(p);
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violation->path, std::vector<int>{1});
  EXPECT_EQ(rep.violation->kernel, "probe");
  EXPECT_NE(rep.violation->describe().find("probe"), std::string::npos);
}

TEST(Race, KernelTreesAreClean) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 4, 4), u = make_matrix<ModP>(ws, 4, 4), v = make_matrix<ModP>(ws, 4, 4);
  KernelConfig cfg;
  cfg.mm_base = 1;
  EXPECT_TRUE(check_race_freedom(mm_program(x, u, v, cfg), &ws).ok());
  EXPECT_TRUE(check_race_freedom(mm_opt(ws, x, u, v, 2, cfg), &ws).ok());
}

TEST(Race, AdversarialPlaneOverlapDetected) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 4, 4, "X"), u = make_matrix<ModP>(ws, 4, 4), v = make_matrix<ModP>(ws, 4, 4);
  KernelConfig cfg;
  cfg.mm_base = 1;
  cfg.inject_plane_overlap = true;
  const auto rep = check_race_freedom(mm_opt(ws, x, u, v, 2, cfg), &ws);
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violation->buffer_name, "X");
  EXPECT_EQ(rep.violation->kernel, "mm-opt'");
}

template <class Build>
void expect_parallel_matches_serial(Build build) {
  Workspace ws1, ws2;
  auto [p1, out1] = build(ws1);
  auto [p2, out2] = build(ws2);
  run_instrumented(p1);
  run_parallel(p2, 2);
  EXPECT_EQ(test::snapshot(out1), test::snapshot(out2));
}

TEST(Parallel, MatchesSerialForKernels) {
  KernelConfig cfg;
  cfg.mm_base = 2;
  cfg.tc_base = 8;
  for (int r : {1, 4}) {
    expect_parallel_matches_serial([&](Workspace& ws) {
      auto x = make_matrix<ModP>(ws, 16, 16), u = make_matrix<ModP>(ws, 16, 16), v = make_matrix<ModP>(ws, 16, 16);
      test::randomize(u, 3);
      test::randomize(v, 4);
      return std::pair{mm_opt(ws, x, u, v, r, cfg), x};
    });
  }
  expect_parallel_matches_serial([&](Workspace& ws) {
    auto x = make_matrix<ModP>(ws, 8, 8), u = make_matrix<ModP>(ws, 8, 8), v = make_matrix<ModP>(ws, 8, 8);
    test::randomize(u, 5);
    test::randomize(v, 6);
    return std::pair{mm_ns(ws, x, u, v, cfg), x};
  });
  expect_parallel_matches_serial([&](Workspace& ws) {
    auto x = make_matrix<ModP>(ws, 4, 4), u = make_matrix<ModP>(ws, 4, 16), v = make_matrix<ModP>(ws, 16, 4);
    test::randomize(u, 7);
    test::randomize(v, 8);
    return std::pair{rmm_opt(ws, x, u, v, 4, cfg), x};
  });
  const auto spec = ContractionSpec::canonical(1, 1, 2);
  expect_parallel_matches_serial([&](Workspace& ws) {
    auto x = make_tensor<ModP>(ws, 2, 4), u = make_tensor<ModP>(ws, 3, 4), v = make_tensor<ModP>(ws, 3, 4);
    test::randomize(u, 9);
    test::randomize(v, 10);
    return std::pair{tc_mm_opt(ws, x, u, v, spec, 4, cfg), x};
  });
}

TEST(Parallel, MoreThreadsNotSlower) {
  if (std::thread::hardware_concurrency() < 2) GTEST_SKIP() << "single hardware thread";
  auto time_with = [](int threads) {
    Workspace ws;
    auto x = make_matrix<double>(ws, 64, 64), u = make_matrix<double>(ws, 64, 64), v = make_matrix<double>(ws, 64, 64);
    KernelConfig cfg;
    auto p = mm_ns(ws, x, u, v, cfg);
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) best = std::min(best, run_parallel(p, threads).seconds);
    return best;
  };
  const int many = static_cast<int>(std::min(8u, std::thread::hardware_concurrency()));
  // soft: allow scheduling noise
  EXPECT_LE(time_with(many), 1.5 * time_with(1));
}

}  // namespace
}  // namespace spt
