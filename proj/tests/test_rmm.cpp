#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>

#include "spt/engine.hpp"
#include "spt/rmm.hpp"
#include "support.hpp"

namespace spt {
namespace {

struct Rect {
  Matrix<ModP> x, u, v;
};

Rect rect(Workspace& ws, index_t a, index_t b, index_t c, std::uint64_t seed) {
  Rect o{make_matrix<ModP>(ws, a, c, "X"), make_matrix<ModP>(ws, a, b, "U"), make_matrix<ModP>(ws, b, c, "V")};
  test::randomize(o.x, seed);
  test::randomize(o.u, seed + 1);
  test::randomize(o.v, seed + 2);
  return o;
}

KernelConfig fine() {
  KernelConfig cfg;
  cfg.mm_base = 1;
  return cfg;
}

bool tagged(const Task& t, const char* name) { return t.tag().kernel != nullptr && std::strcmp(t.tag().kernel, name) == 0; }

// Shapes of the plain rmm subtrees hanging off the plane recursion.
void base_shapes(const Task& t, std::vector<TaskTag>& out) {
  if (tagged(t, "rmm")) {
    out.push_back(t.tag());
    return;
  }
  for (const Task& c : t.children()) base_shapes(c, out);
}

TEST(Rmm, UnitShapeIsOneMultiplyAdd) {
  Workspace ws;
  const Rect o = rect(ws, 1, 1, 1, 1);
  const Task t = rmm(o.x, o.u, o.v, fine());
  EXPECT_EQ(analyze(t).madds, 1);
}

TEST(Rmm, DotProductIsSerialChain) {
  Workspace ws;
  const Rect o = rect(ws, 1, 8, 1, 1);
  const auto m = analyze(rmm(o.x, o.u, o.v, fine()));
  EXPECT_EQ(m.madds, 8);
  EXPECT_GE(m.span, 8);
  EXPECT_EQ(m.forks, 0);
}

TEST(Rmm, SplitOrderFollowsLongestDimension) {
  Workspace ws;
  const Rect tall = rect(ws, 8, 2, 2, 1);
  EXPECT_EQ(rmm(tall.x, tall.u, tall.v, fine()).kind(), TaskKind::fork);
  const Rect deep = rect(ws, 2, 8, 2, 1);
  EXPECT_EQ(rmm(deep.x, deep.u, deep.v, fine()).kind(), TaskKind::sequence);
  const Rect tie = rect(ws, 4, 4, 4, 1);
  const Task t = rmm(tie.x, tie.u, tie.v, fine());
  EXPECT_EQ(t.kind(), TaskKind::fork);
  EXPECT_EQ(t.children()[0].tag().a, 2);
  EXPECT_EQ(t.children()[0].tag().b, 4);
}

TEST(Rmm, OracleOverShapes) {
  for (index_t a : {1, 2, 4, 8})
    for (index_t b : {1, 2, 4, 8})
      for (index_t c : {1, 2, 4, 8}) {
        Workspace ws;
        const Rect o = rect(ws, a, b, c, 5);
        Program p;
        p.root = rmm(o.x, o.u, o.v, fine());
        p.zero_on_entry = {o.x.storage()};
        ASSERT_TRUE(check_race_freedom(p, &ws).ok());
        EXPECT_EQ(run_instrumented(p).madds, a * b * c);
        EXPECT_EQ(test::snapshot(o.x), test::oracle_mm(o.u, o.v)) << a << "x" << b << "x" << c;
      }
}

TEST(RmmOpt, OracleOverShapesAndPlanes) {
  for (index_t a : {1, 2, 4, 8})
    for (index_t b : {1, 2, 4, 8})
      for (index_t c : {1, 2, 4, 8})
        for (int r = 1; r <= b; r *= 2) {
          Workspace ws;
          const Rect o = rect(ws, a, b, c, 9);
          Program p = rmm_opt(ws, o.x, o.u, o.v, r, fine());
          ASSERT_TRUE(check_race_freedom(p, &ws).ok());
          EXPECT_EQ(run_instrumented(p).madds, a * b * c);
          EXPECT_EQ(test::snapshot(o.x), test::oracle_mm(o.u, o.v)) << a << "x" << b << "x" << c << " r=" << r;
        }
}

TEST(RmmOpt, SinglePlaneEqualsRmm) {
  Workspace ws;
  const Rect o = rect(ws, 4, 8, 2, 1);
  const auto opt = analyze(rmm_opt(ws, o.x, o.u, o.v, 1, fine()));
  EXPECT_EQ(opt.madds, analyze(rmm(o.x, o.u, o.v, fine())).madds);
  EXPECT_EQ(opt.span, analyze(rmm(o.x, o.u, o.v, fine())).span);
}

TEST(RmmOpt, SpanDropsWithPlanes) {
  Workspace ws;
  const Rect o = rect(ws, 2, 32, 2, 1);
  EXPECT_LT(analyze(rmm_opt(ws, o.x, o.u, o.v, 8, fine())).span, analyze(rmm_opt(ws, o.x, o.u, o.v, 1, fine())).span);
}

TEST(RmmOpt, BaseShapeLawWhenInnerDominates) {
  for (index_t a : {1, 2, 4})
    for (index_t c : {1, 2, 4})
      for (int r : {1, 2, 4, 8}) {
        const index_t b = 64;
        if (b / r < std::max(a, c)) continue;
        Workspace ws;
        const Rect o = rect(ws, a, b, c, 1);
        std::vector<TaskTag> shapes;
        base_shapes(rmm_opt(ws, o.x, o.u, o.v, r, fine()).root, shapes);
        ASSERT_FALSE(shapes.empty());
        const index_t bp = b / r;
        for (const TaskTag& s : shapes) {
          EXPECT_EQ(s.b, bp);
          EXPECT_EQ(s.a, std::min(a, bp));
          EXPECT_EQ(s.c, std::min(c, bp));
        }
      }
}

TEST(RmmOpt, BaseShapeLawWithinFactorTwoOtherwise) {
  for (index_t a : {4, 8, 16})
    for (index_t c : {4, 8, 16})
      for (int r : {2, 4, 8}) {
        const index_t b = 16;
        Workspace ws;
        const Rect o = rect(ws, a, b, c, 1);
        std::vector<TaskTag> shapes;
        base_shapes(rmm_opt(ws, o.x, o.u, o.v, r, fine()).root, shapes);
        const index_t bp = b / r;
        for (const TaskTag& s : shapes) {
          EXPECT_EQ(s.b, bp);
          EXPECT_LE(s.a, 2 * std::min(a, bp));
          EXPECT_GE(2 * s.a, std::min(a, bp));
          EXPECT_LE(s.c, 2 * std::min(c, bp));
          EXPECT_GE(2 * s.c, std::min(c, bp));
        }
      }
}

TEST(RmmOpt, SpanRatioAcrossDoubling) {
  Workspace ws;
  const Rect o = rect(ws, 4, 64, 4, 1);
  KernelConfig cfg = fine();
  cfg.block = 8;
  std::int64_t prev = analyze(rmm_opt(ws, o.x, o.u, o.v, 1, cfg)).span;
  for (int r = 2; r <= 16; r *= 2) {
    const std::int64_t s = analyze(rmm_opt(ws, o.x, o.u, o.v, r, cfg)).span;
    EXPECT_LT(s, prev) << r;
    prev = s;
  }
}

TEST(RmmOpt, RejectsIllegalPlaneCounts) {
  Workspace ws;
  const Rect o = rect(ws, 4, 4, 4, 1);
  EXPECT_THROW(rmm_opt(ws, o.x, o.u, o.v, 8), Error);
  EXPECT_THROW(rmm_opt(ws, o.x, o.u, o.v, 3), Error);
  auto bad = make_matrix<ModP>(ws, 2, 4);
  EXPECT_THROW(rmm(o.x, bad, o.v), Error);
}

TEST(RmmOpt, InjectedOverlapIsARace) {
  Workspace ws;
  const Rect o = rect(ws, 2, 8, 2, 1);
  KernelConfig cfg = fine();
  cfg.inject_plane_overlap = true;
  EXPECT_FALSE(check_race_freedom(rmm_opt(ws, o.x, o.u, o.v, 2, cfg), &ws).ok());
}

}  // namespace
}  // namespace spt
