#include <gtest/gtest.h>

#include <array>
#include <set>

#include "spt/linearize.hpp"
#include "spt/matrix.hpp"
#include "spt/planes.hpp"
#include "spt/scalar.hpp"
#include "spt/tensor.hpp"
#include "support.hpp"

namespace spt {
namespace {

Matrix<ModP> iota_matrix(Workspace& ws, index_t rows, index_t cols) {
  auto m = make_matrix<ModP>(ws, rows, cols);
  for (index_t e = 0; e < rows * cols; ++e) m.storage()->data()[e] = ModP(static_cast<std::uint64_t>(e));
  return m;
}

std::set<index_t> cells(const Matrix<ModP>& m) {
  std::set<index_t> out;
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t j = 0; j < m.cols(); ++j) out.insert(m.index(i, j));
  return out;
}

TEST(ModP, WrapsAtModulus) {
  EXPECT_EQ(ModP(ModP::kModulus).value(), 0u);
  EXPECT_EQ((ModP(ModP::kModulus - 1) + ModP(2)).value(), 1u);
  EXPECT_EQ((ModP(1u << 30) * ModP(4)).value(), 2u);
  const std::uint64_t a = 123456789, b = 987654321;
  EXPECT_EQ((ModP(a) * ModP(b)).value(), static_cast<std::uint32_t>(a * b % ModP::kModulus));
}

TEST(Matrix, QuadrantsOfTwoByTwo) {
  Workspace ws;
  auto m = make_matrix<ModP>(ws, 2, 2);
  m(0, 0) = ModP(1);
  m(0, 1) = ModP(2);
  m(1, 0) = ModP(3);
  m(1, 1) = ModP(4);
  EXPECT_EQ(m.quadrant(Quadrant::q11)(0, 0), ModP(1));
  EXPECT_EQ(m.quadrant(Quadrant::q22)(0, 0), ModP(4));
}

TEST(Matrix, Quadrant21OfRowMajorIota) {
  Workspace ws;
  auto q = iota_matrix(ws, 4, 4).quadrant(Quadrant::q21);
  EXPECT_EQ(test::snapshot(q), (std::vector<ModP>{ModP(8), ModP(9), ModP(12), ModP(13)}));
}

TEST(Matrix, QuadrantsPartitionParent) {
  Workspace ws;
  auto m = iota_matrix(ws, 8, 4);
  std::set<index_t> seen;
  std::size_t total = 0;
  for (Quadrant q : {Quadrant::q11, Quadrant::q12, Quadrant::q21, Quadrant::q22}) {
    const auto c = cells(m.quadrant(q));
    total += c.size();
    seen.insert(c.begin(), c.end());
  }
  EXPECT_EQ(total, seen.size());
  EXPECT_EQ(seen, cells(m));
}

TEST(Matrix, HalvesPartitionParent) {
  Workspace ws;
  auto m = iota_matrix(ws, 4, 8);
  for (auto [a, b] : {std::pair{m.top(), m.bottom()}, std::pair{m.left(), m.right()}}) {
    auto ca = cells(a), cb = cells(b);
    for (index_t e : cb) EXPECT_FALSE(ca.count(e));
    ca.insert(cb.begin(), cb.end());
    EXPECT_EQ(ca, cells(m));
  }
}

TEST(Matrix, ViewsWriteThrough) {
  Workspace ws;
  auto m = make_matrix<ModP>(ws, 4, 4);
  m.quadrant(Quadrant::q12)(1, 0) = ModP(77);
  EXPECT_EQ(m(1, 2), ModP(77));
}

TEST(Matrix, RejectsNonPowerOfTwo) {
  Workspace ws;
  EXPECT_THROW(make_matrix<ModP>(ws, 3, 4), Error);
  EXPECT_THROW(make_tensor<ModP>(ws, 2, 6), Error);
}

TEST(Matrix, DegenerateSplitThrows) {
  Workspace ws;
  auto m = make_matrix<ModP>(ws, 1, 4);
  EXPECT_THROW(m.quadrant(Quadrant::q11), Error);
  EXPECT_THROW(m.top(), Error);
  EXPECT_NO_THROW(m.left());
}

TEST(Tensor, OrthantOfVector) {
  Workspace ws;
  auto t = make_tensor<ModP>(ws, 1, 2);
  t.storage()->data()[0] = ModP(5);
  t.storage()->data()[1] = ModP(7);
  const std::array<int, 1> sel{2};
  const auto o = t.orthant(sel);
  EXPECT_EQ(o.side(), 1);
  EXPECT_EQ(test::snapshot(o), std::vector<ModP>{ModP(7)});
}

TEST(Tensor, OrthantMatchesQuadrant) {
  Workspace ws;
  auto t = make_tensor<ModP>(ws, 2, 2);
  test::randomize(t, 1);
  const std::array<int, 2> sel{1, 2};
  EXPECT_EQ(test::snapshot(t.orthant(sel)), test::snapshot(t.as_matrix().quadrant(Quadrant::q12)));
}

TEST(Tensor, OrthantOffsetsInThreeD) {
  Workspace ws;
  auto t = make_tensor<ModP>(ws, 3, 4);
  const std::array<int, 3> sel{2, 1, 2};
  const auto o = t.orthant(sel);
  EXPECT_EQ(o.side(), 2);
  const std::array<index_t, 3> origin{2, 0, 2};
  EXPECT_EQ(o.offset(), t.index(origin));
  const std::array<index_t, 3> corner{1, 1, 1};
  const std::array<index_t, 3> parent{3, 1, 3};
  EXPECT_EQ(o.index(corner), t.index(parent));
}

TEST(Tensor, OrthantsPartitionParent) {
  Workspace ws;
  for (int d = 1; d <= 4; ++d) {
    auto t = make_tensor<ModP>(ws, d, 4);
    std::set<index_t> seen;
    std::size_t total = 0;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      const auto o = t.orthant_mask(mask);
      for (index_t e = 0; e < o.size(); ++e) {
        seen.insert(o.index(test::unrank(e, d, o.side())));
        ++total;
      }
    }
    EXPECT_EQ(total, seen.size());
    EXPECT_EQ(static_cast<index_t>(seen.size()), t.size());
  }
}

TEST(Linearize, Examples) {
  const std::array<int, 2> low{1, 1}, high{2, 2};
  const std::array<int, 3> mixed{2, 1, 2};
  EXPECT_EQ(linearize(low), 1);
  EXPECT_EQ(linearize(high), 4);
  EXPECT_EQ(linearize(mixed), 6);
  const std::array<int, 1> bad{3};
  EXPECT_THROW(linearize(bad), Error);
}

TEST(Linearize, BijectiveOnSelectors) {
  for (int k = 1; k <= 3; ++k) {
    std::set<index_t> out;
    for (int code = 0; code < (1 << k); ++code) {
      std::vector<int> sel;
      for (int b = k - 1; b >= 0; --b) sel.push_back(((code >> b) & 1) + 1);
      const index_t l = linearize(sel);
      EXPECT_GE(l, 1);
      EXPECT_LE(l, index_t{1} << k);
      out.insert(l);
    }
    EXPECT_EQ(out.size(), std::size_t{1} << k);
  }
}

TEST(Linearize, MortonIsBijectionOfTuples) {
  for (index_t side : {2, 4, 8}) {
    for (int k = 1; k <= 3; ++k) {
      std::set<index_t> codes;
      const index_t total = ipow(side, k);
      for (index_t e = 0; e < total; ++e) {
        const auto coords = test::unrank(e, k, side);
        const index_t code = morton_index(coords, side);
        EXPECT_LT(code, total);
        EXPECT_EQ(morton_coords(code, k, side), coords);
        codes.insert(code);
      }
      EXPECT_EQ(static_cast<index_t>(codes.size()), total);
    }
  }
}

TEST(RankVector, InverseAndValidation) {
  const RankVector rv({2, 1, 5, 4, 3});
  EXPECT_EQ(rv.inverse().inverse(), rv);
  EXPECT_EQ(RankVector({3, 1, 2}).inverse(), RankVector({2, 3, 1}));
  EXPECT_THROW(RankVector({1, 1}), Error);
  EXPECT_THROW(RankVector({0, 1}), Error);
}

TEST(Planes, RangesAndPlaneViews) {
  Workspace ws;
  auto x = make_matrix<ModP>(ws, 2, 2, "X");
  auto planes = make_matrix_planes(ws, x, 4);
  EXPECT_EQ(planes.count(), 4);
  EXPECT_EQ(planes.plane(0).storage(), x.storage());
  EXPECT_NE(planes.plane(1).storage(), x.storage());
  EXPECT_EQ(planes.plane(3).offset(), 8);
  const auto sub = planes.range(2, 3);
  EXPECT_EQ(sub.active(), 2);
  EXPECT_THROW(planes.range(3, 4), Error);
  EXPECT_THROW(make_matrix_planes(ws, x, 0), Error);
}

}  // namespace
}  // namespace spt
