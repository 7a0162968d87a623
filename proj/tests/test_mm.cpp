#include <gtest/gtest.h>

#include <functional>

#include "spt/engine.hpp"
#include "spt/mm.hpp"
#include "support.hpp"

namespace spt {
namespace {

struct Operands {
  Matrix<ModP> x, u, v;
};

Operands square(Workspace& ws, index_t n, std::uint64_t seed) {
  Operands o{make_matrix<ModP>(ws, n, n, "X"), make_matrix<ModP>(ws, n, n, "U"), make_matrix<ModP>(ws, n, n, "V")};
  test::randomize(o.x, seed);  // drivers must clear stale output
  test::randomize(o.u, seed + 1);
  test::randomize(o.v, seed + 2);
  return o;
}

KernelConfig fine() {
  KernelConfig cfg;
  cfg.mm_base = 1;
  cfg.block = 2;
  return cfg;
}

using Driver = std::function<Program(Workspace&, const Operands&, int, const KernelConfig&)>;

const std::vector<std::pair<std::string, Driver>>& drivers() {
  static const std::vector<std::pair<std::string, Driver>> d = {
      {"mm", [](Workspace&, const Operands& o, int, const KernelConfig& c) { return mm_program(o.x, o.u, o.v, c); }},
      {"mm-hd", [](Workspace& ws, const Operands& o, int r, const KernelConfig& c) { return mm_hd(ws, o.x, o.u, o.v, r, c); }},
      {"mm-opt", [](Workspace& ws, const Operands& o, int r, const KernelConfig& c) { return mm_opt(ws, o.x, o.u, o.v, r, c); }},
      {"mm-nd", [](Workspace& ws, const Operands& o, int, const KernelConfig& c) { return mm_nd(ws, o.x, o.u, o.v, c); }},
      {"mm-ns", [](Workspace& ws, const Operands& o, int, const KernelConfig& c) { return mm_ns(ws, o.x, o.u, o.v, c); }},
  };
  return d;
}

ExecMetrics run_driver(const std::string& name, index_t n, int r, const KernelConfig& cfg, bool* matches,
                       std::uint64_t seed = 11) {
  Workspace ws;
  const Operands o = square(ws, n, seed);
  const auto expect = test::oracle_mm(o.u, o.v);
  for (const auto& [k, make] : drivers()) {
    if (k != name) continue;
    Program p = make(ws, o, r, cfg);
    EXPECT_TRUE(check_race_freedom(p, &ws).ok()) << name << " n=" << n << " r=" << r;
    const auto m = run_instrumented(p);
    *matches = test::snapshot(o.x) == expect;
    return m;
  }
  ADD_FAILURE() << "no driver " << name;
  return {};
}

TEST(MmLoop, Examples) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 2, 2), u = make_matrix<ModP>(ws, 2, 2), v = make_matrix<ModP>(ws, 2, 2);
  auto set = [](const Matrix<ModP>& m, std::initializer_list<int> vals) {
    int e = 0;
    for (int val : vals) m(e / 2, e % 2) = ModP(static_cast<std::uint64_t>(val)), ++e;
  };
  set(u, {1, 0, 0, 1});
  set(v, {1, 2, 3, 4});
  mm_loop(x, u, v);
  EXPECT_EQ(test::snapshot(x), test::snapshot(v));

  set(x, {1, 1, 1, 1});
  set(u, {0, 0, 0, 0});
  mm_loop(x, u, v);
  EXPECT_EQ(test::snapshot(x), (std::vector<ModP>(4, ModP(1))));

  set(x, {0, 0, 0, 0});
  set(u, {1, 2, 3, 4});
  set(v, {5, 6, 7, 8});
  mm_loop(x, u, v);
  EXPECT_EQ(test::snapshot(x), (std::vector<ModP>{ModP(19), ModP(22), ModP(43), ModP(50)}));
}

TEST(Mm, SideOneIsSingleLeaf) {
  Workspace ws;
  const Operands o = square(ws, 1, 1);
  const Task t = mm(o.x, o.u, o.v, fine());
  EXPECT_EQ(t.kind(), TaskKind::leaf);
  EXPECT_EQ(analyze(t).madds, 1);
}

TEST(Mm, DoubleScalarsMatchOracleClosely) {
  Workspace ws;
  auto x = make_matrix<double>(ws, 8, 8), u = make_matrix<double>(ws, 8, 8), v = make_matrix<double>(ws, 8, 8);
  test::randomize(u, 1);
  test::randomize(v, 2);
  auto p = mm_opt(ws, x, u, v, 4, fine());
  run_instrumented(p);
  const auto want = test::oracle_mm(u, v);
  const auto got = test::snapshot(x);
  for (std::size_t e = 0; e < want.size(); ++e) EXPECT_NEAR(got[e], want[e], 1e-9 * std::abs(want[e]) + 1e-12);
}

class MmFamily : public ::testing::TestWithParam<std::string> {};

TEST_P(MmFamily, OracleWorkAndRaceFreedom) {
  const std::string name = GetParam();
  for (index_t n : {2, 4, 8, 16}) {
    std::vector<int> rs{1};
    if (name == "mm-hd" || name == "mm-opt") {
      rs.clear();
      for (int r = 1; r <= n; r *= 2) rs.push_back(r);
    }
    for (int r : rs) {
      for (const KernelConfig& cfg : {fine(), KernelConfig{}}) {
        bool ok = false;
        const auto m = run_driver(name, n, r, cfg, &ok);
        EXPECT_TRUE(ok) << name << " n=" << n << " r=" << r;
        EXPECT_EQ(m.madds, n * n * n) << name << " n=" << n << " r=" << r;
        EXPECT_LE(m.span, m.work);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Drivers, MmFamily, ::testing::Values("mm", "mm-hd", "mm-opt", "mm-nd", "mm-ns"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& ch : s) if (ch == '-') ch = '_';
                           return s;
                         });

TEST(MmReduce, TwoPlaneExamples) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 4, 4), y = make_matrix<ModP>(ws, 4, 4);
  test::randomize(x, 5);
  const auto before = test::snapshot(x);
  Program p;
  p.root = mm_reduce2(x, y);
  run_instrumented(p);
  EXPECT_EQ(test::snapshot(x), before);

  for (auto* s : {x.storage(), y.storage()}) std::fill(s->data(), s->data() + 16, ModP(1));
  p.root = mm_reduce2(x, y);
  run_instrumented(p);
  EXPECT_EQ(test::snapshot(x), std::vector<ModP>(16, ModP(2)));
}

TEST(MmReduce, TwoPlaneSpanAtSideEightBlockTwo) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 8, 8), y = make_matrix<ModP>(ws, 8, 8);
  KernelConfig cfg;
  cfg.block = 2;
  EXPECT_EQ(analyze(mm_reduce2(x, y, cfg)).span, 3 + 2 + 2);
}

TEST(MmReduce, ManyPlanes) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 8, 8, "X");
  {
    auto planes = make_matrix_planes(ws, x, 1);
    EXPECT_TRUE(mm_reduce_r(planes).empty());
  }
  auto ones = make_matrix_planes(ws, x, 4);
  std::fill(x.storage()->data(), x.storage()->data() + 64, ModP(1));
  for (int k = 1; k < 4; ++k) {
    const auto pk = ones.plane(k);
    for (index_t i = 0; i < 8; ++i)
      for (index_t j = 0; j < 8; ++j) pk(i, j) = ModP(1);
  }
  Program p;
  p.root = mm_reduce_r(ones);
  run_instrumented(p);
  EXPECT_EQ(test::snapshot(x), std::vector<ModP>(64, ModP(4)));

  auto planes = make_matrix_planes<ModP>(ws, 8, 8, 8, "P");
  std::vector<ModP> want(64);
  for (int k = 0; k < 8; ++k) {
    test::randomize(planes.plane(k), 100 + k);
    const auto s = test::snapshot(planes.plane(k));
    for (std::size_t e = 0; e < 64; ++e) want[e] += s[e];
  }
  p.root = mm_reduce_r(planes);
  EXPECT_TRUE(check_race_freedom(p).ok());
  run_instrumented(p);
  EXPECT_EQ(test::snapshot(planes.plane(0)), want);
}

TEST(MmHd, SinglePlaneMatchesMmTree) {
  Workspace ws;
  const Operands o = square(ws, 8, 3);
  const auto hd = analyze(mm_hd(ws, o.x, o.u, o.v, 1, fine()));
  const auto plain = analyze(mm_program(o.x, o.u, o.v, fine()));
  EXPECT_EQ(hd, plain);
}

TEST(MmHd, SpaceGrowsWithPlanes) {
  bool ok = false;
  const double s4 = static_cast<double>(run_driver("mm-hd", 16, 4, fine(), &ok).peak_space);
  const double s1 = static_cast<double>(run_driver("mm-hd", 16, 1, fine(), &ok).peak_space);
  EXPECT_GE(s4 / s1, 2.5);
  EXPECT_LE(s4 / s1, 4.5);
}

TEST(MmOpt, SinglePlaneMatchesMm) {
  Workspace ws;
  const Operands o = square(ws, 8, 3);
  EXPECT_EQ(analyze(mm_opt(ws, o.x, o.u, o.v, 1, fine())), analyze(mm_program(o.x, o.u, o.v, fine())));
}

TEST(MmOpt, SpanFallsAndSpaceRisesWithPlanes) {
  KernelConfig cfg = fine();
  cfg.block = 8;
  std::int64_t prev_span = 0, prev_space = 0;
  for (int r = 1; r <= 32; r *= 2) {
    bool ok = false;
    const auto m = run_driver("mm-opt", 32, r, cfg, &ok);
    EXPECT_TRUE(ok);
    if (r > 1) {
      EXPECT_LT(m.span, prev_span) << r;
      EXPECT_GE(m.peak_space, prev_space) << r;
    }
    EXPECT_EQ(m.peak_space, r * 32 * 32);
    prev_span = m.span;
    prev_space = m.peak_space;
  }
}

TEST(MmOpt, AllPlanesSpanIsLogarithmic) {
  KernelConfig cfg = fine();
  cfg.block = 8;
  std::vector<double> ratios;
  for (index_t n : {8, 16, 32, 64}) {
    Workspace ws;
    const Operands o = square(ws, n, 1);
    ratios.push_back(static_cast<double>(analyze(mm_opt(ws, o.x, o.u, o.v, static_cast<int>(n), cfg)).span) /
                     log2_floor(static_cast<std::uint64_t>(n)));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 2.0);
}

void check_plane_split(const Task& t, int& checked) {
  if (t.tag().kernel != nullptr && std::string(t.tag().kernel) == "mm-opt'") {
    const int lo = t.tag().plane_lo, hi = t.tag().plane_hi, m = (lo + hi) / 2;
    ASSERT_EQ(t.children().size(), 8u);
    for (std::size_t c = 0; c < 8; ++c) {
      const TaskTag& tag = t.children()[c].tag();
      if (tag.kernel == nullptr || std::string(tag.kernel) != "mm-opt'") continue;
      EXPECT_EQ(tag.plane_lo, c < 4 ? lo : m + 1);
      EXPECT_EQ(tag.plane_hi, c < 4 ? m : hi);
      ++checked;
    }
  }
  for (const Task& c : t.children()) check_plane_split(c, checked);
}

TEST(MmOpt, ChildGroupsGetDisjointPlaneHalves) {
  Workspace ws;
  const Operands o = square(ws, 16, 1);
  const Program p = mm_opt(ws, o.x, o.u, o.v, 8, fine());
  int checked = 0;
  check_plane_split(p.root, checked);
  EXPECT_GT(checked, 0);
}

TEST(MmOpt, RejectsBadPlaneCounts) {
  Workspace ws;
  const Operands o = square(ws, 4, 1);
  EXPECT_THROW(mm_opt(ws, o.x, o.u, o.v, 3), Error);
  EXPECT_THROW(mm_opt(ws, o.x, o.u, o.v, 8), Error);
  EXPECT_THROW(mm_hd(ws, o.x, o.u, o.v, 0), Error);
  auto wide = make_matrix<ModP>(ws, 4, 8);
  EXPECT_THROW(mm_program(o.x, wide, o.v), Error);
  EXPECT_THROW(mm_program(o.x.quadrant(Quadrant::q11), o.u.quadrant(Quadrant::q11), o.v.quadrant(Quadrant::q11)),
               Error);
}

TEST(MmNs, SpanGrowsLogarithmically) {
  KernelConfig cfg = fine();
  cfg.block = 8;
  auto span = [&](index_t n) {
    Workspace ws;
    const Operands o = square(ws, n, 1);
    return static_cast<double>(analyze(mm_ns(ws, o.x, o.u, o.v, cfg)).span);
  };
  EXPECT_LE(span(64) / span(8), 3.0);
}

TEST(MmNd, SpaceIsCubic) {
  bool ok = false;
  const auto nd = run_driver("mm-nd", 8, 1, fine(), &ok);
  EXPECT_TRUE(ok);
  const auto plain = run_driver("mm", 8, 1, fine(), &ok);
  EXPECT_GE(static_cast<double>(nd.peak_space) / static_cast<double>(plain.peak_space), 4.0);
}

TEST(MmTradeoff, ChoiceBands) {
  EXPECT_EQ(mm_tradeoff_choice(8, 1).planes, 1);
  EXPECT_EQ(mm_tradeoff_choice(8, 64).planes, 1);
  EXPECT_EQ(mm_tradeoff_choice(8, 512).planes, 8);
  const auto exact = mm_tradeoff_choice(16, 4 * 256);
  EXPECT_EQ(exact.planes, 4);
  EXPECT_FALSE(exact.rounded);
  const auto three = mm_tradeoff_choice(16, 3 * 256);
  EXPECT_EQ(three.band, 3);
  EXPECT_EQ(three.planes, 2);
  EXPECT_TRUE(three.rounded);
  EXPECT_NE(three.describe().find("2"), std::string::npos);
  const auto huge = mm_tradeoff_choice(4, 1000);
  EXPECT_EQ(huge.planes, 4);
  EXPECT_TRUE(huge.clamped);
  EXPECT_THROW(mm_tradeoff_choice(4, 0), Error);
}

TEST(MmTradeoff, MatchesOracleAcrossProcessorCounts) {
  for (index_t n : {2, 4, 8, 16}) {
    for (std::int64_t p : {std::int64_t{1}, n * n, n * n + 1, 3 * n * n, n * n * n}) {
      Workspace ws;
      const Operands o = square(ws, n, 7);
      TradeoffChoice choice;
      Program prog = mm_tradeoff(ws, o.x, o.u, o.v, p, fine(), &choice);
      EXPECT_TRUE(check_race_freedom(prog, &ws).ok());
      EXPECT_EQ(run_instrumented(prog).madds, n * n * n);
      EXPECT_EQ(test::snapshot(o.x), test::oracle_mm(o.u, o.v)) << "n=" << n << " p=" << p;
    }
  }
}

}  // namespace
}  // namespace spt
