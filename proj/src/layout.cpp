#include "spt/layout.hpp"

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "leaves.hpp"
#include "spt/error.hpp"
#include "spt/scalar.hpp"

namespace spt {

namespace {

void unrank(index_t code, index_t side, int count, index_t* out) {
  for (int a = count - 1; a >= 0; --a) {
    out[a] = code % side;
    code /= side;
  }
}

index_t rank_of(const index_t* coords, index_t side, int count) {
  index_t code = 0;
  for (int a = 0; a < count; ++a) code = code * side + coords[a];
  return code;
}

void cell_to_coords(index_t row, index_t col, int s1, int s2, index_t side, FlattenOrder order, index_t* out) {
  if (order == FlattenOrder::row_major) {
    unrank(row, side, s1, out);
    unrank(col, side, s2, out + s1);
    return;
  }
  const auto ri = morton_coords(row, s1, side);
  const auto cj = morton_coords(col, s2, side);
  std::copy(ri.begin(), ri.end(), out);
  std::copy(cj.begin(), cj.end(), out + s1);
}

template <class T>
class PermuteLeaf final : public Leaf {
 public:
  PermuteLeaf(const Tensor<T>& w, const Tensor<T>& r, const RankVector& ranks) : w_(w), r_(r), ranks_(ranks) {}

  void run() override {
    walk([&](index_t wi, index_t ri) { w_.storage()->data()[wi] = r_.storage()->data()[ri]; });
  }
  void accesses(AccessSink& sink) const override {
    walk([&](index_t wi, index_t ri) {
      sink.on_access(r_.storage()->id(), static_cast<std::uint64_t>(ri), false);
      sink.on_access(w_.storage()->id(), static_cast<std::uint64_t>(wi), true);
    });
  }
  LeafCost cost() const override { return {w_.size(), w_.size(), 0}; }

 private:
  template <class F>
  void walk(F&& f) const {
    const int d = w_.order();
    std::array<index_t, kMaxOrder> y{};
    std::array<index_t, kMaxOrder> z{};
    for (index_t e = 0; e < w_.size(); ++e) {
      unrank(e, w_.side(), d, y.data());
      for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = y[static_cast<std::size_t>(ranks_[a] - 1)];
      f(w_.index(std::span<const index_t>(y.data(), static_cast<std::size_t>(d))),
        r_.index(std::span<const index_t>(z.data(), static_cast<std::size_t>(d))));
    }
  }

  Tensor<T> w_, r_;
  RankVector ranks_;
};

/// Moves rows [row0, row0 + rows) of a flattened view between matrix and tensor.
template <class T>
class FlattenLeaf final : public Leaf {
 public:
  FlattenLeaf(const Matrix<T>& m, const Tensor<T>& t, int s1, FlattenOrder order, bool to_matrix, index_t row0,
              index_t rows)
      : m_(m), t_(t), s1_(s1), order_(order), to_matrix_(to_matrix), row0_(row0), rows_(rows) {}

  void run() override {
    walk([&](index_t mi, index_t ti) {
      if (to_matrix_) {
        m_.storage()->data()[mi] = t_.storage()->data()[ti];
      } else {
        t_.storage()->data()[ti] = m_.storage()->data()[mi];
      }
    });
  }
  void accesses(AccessSink& sink) const override {
    walk([&](index_t mi, index_t ti) {
      const auto m = static_cast<std::uint64_t>(mi);
      const auto t = static_cast<std::uint64_t>(ti);
      if (to_matrix_) {
        sink.on_access(t_.storage()->id(), t, false);
        sink.on_access(m_.storage()->id(), m, true);
      } else {
        sink.on_access(m_.storage()->id(), m, false);
        sink.on_access(t_.storage()->id(), t, true);
      }
    });
  }
  LeafCost cost() const override {
    const std::int64_t s = rows_ * m_.cols();
    return {s, s, 0};
  }

 private:
  template <class F>
  void walk(F&& f) const {
    std::array<index_t, kMaxOrder> c{};
    const int s2 = t_.order() - s1_;
    for (index_t i = row0_; i < row0_ + rows_; ++i) {
      for (index_t j = 0; j < m_.cols(); ++j) {
        cell_to_coords(i, j, s1_, s2, t_.side(), order_, c.data());
        f(m_.index(i, j), t_.index(std::span<const index_t>(c.data(), static_cast<std::size_t>(t_.order()))));
      }
    }
  }

  Matrix<T> m_;
  Tensor<T> t_;
  int s1_;
  FlattenOrder order_;
  bool to_matrix_;
  index_t row0_, rows_;
};

template <class T>
void check_flatten(const Matrix<T>& m, const Tensor<T>& t, int s1, int s2) {
  if (s1 < 0 || s2 < 0 || s1 + s2 != t.order()) throw Error(Errc::shape_mismatch, "axis groups do not cover the tensor");
  if (m.rows() != ipow(t.side(), s1) || m.cols() != ipow(t.side(), s2)) {
    throw Error(Errc::shape_mismatch, "matrix shape does not match the flattened tensor");
  }
}

template <class T>
Task flatten_rec(const Matrix<T>& m, const Tensor<T>& t, int s1, int s2, bool to_matrix, const KernelConfig& cfg) {
  const index_t n = t.side();
  if (n == 1 || t.size() <= cfg.tc_base) {
    return detail::make_leaf<FlattenLeaf<T>>(m, t, s1, FlattenOrder::morton, to_matrix, 0, m.rows());
  }
  const index_t h1 = m.rows() >> s1;
  const index_t h2 = m.cols() >> s2;
  const std::uint32_t count = 1u << (s1 + s2);
  std::vector<Task> kids;
  kids.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const index_t big_i = linearize_bits(mask, 0, s1);
    const index_t big_j = linearize_bits(mask, s1, s2);
    kids.push_back(flatten_rec(m.block(big_i * h1, big_j * h2, h1, h2), t.orthant_mask(mask), s1, s2, to_matrix, cfg));
  }
  return Task::parallel_for(std::move(kids)).as_call().tagged({to_matrix ? "tf" : "td", -1, -1, m.rows(), m.cols(), 0});
}

template <class T>
Task flatten_task(const Matrix<T>& m, const Tensor<T>& t, int s1, int s2, FlattenOrder order, bool to_matrix,
                  const KernelConfig& cfg) {
  check_flatten(m, t, s1, s2);
  if (order == FlattenOrder::morton) return flatten_rec(m, t, s1, s2, to_matrix, cfg);
  std::vector<Task> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (index_t i = 0; i < m.rows(); ++i) {
    rows.push_back(detail::make_leaf<FlattenLeaf<T>>(m, t, s1, order, to_matrix, i, 1));
  }
  return Task::parallel_for(std::move(rows));
}

}  // namespace

std::pair<index_t, index_t> flatten_cell(std::span<const index_t> coords, int s1, index_t side, FlattenOrder order) {
  const int d = static_cast<int>(coords.size());
  if (s1 < 0 || s1 > d) throw Error(Errc::invalid_argument, "axis split out of range");
  if (order == FlattenOrder::row_major) {
    return {rank_of(coords.data(), side, s1), rank_of(coords.data() + s1, side, d - s1)};
  }
  return {morton_index(coords.subspan(0, static_cast<std::size_t>(s1)), side),
          morton_index(coords.subspan(static_cast<std::size_t>(s1)), side)};
}

template <class T>
Task tt(const Tensor<T>& w, const Tensor<T>& r, const RankVector& ranks, const KernelConfig& cfg) {
  if (w.order() != r.order() || w.side() != r.side()) throw Error(Errc::shape_mismatch, "transpose needs equal shapes");
  if (ranks.size() != w.order()) throw Error(Errc::invalid_argument, "rank vector length differs from tensor order");
  const int d = w.order();
  if (w.side() == 1 || w.size() <= cfg.tc_base) return detail::make_leaf<PermuteLeaf<T>>(w, r, ranks);
  const std::uint32_t count = 1u << d;
  std::vector<Task> kids;
  kids.reserve(count);
  for (std::uint32_t p = 0; p < count; ++p) {
    std::uint32_t src = 0;
    for (int a = 0; a < d; ++a) src |= ((p >> (ranks[a] - 1)) & 1u) << a;
    kids.push_back(tt(w.orthant_mask(p), r.orthant_mask(src), ranks, cfg));
  }
  return Task::parallel_for(std::move(kids)).as_call().tagged({"tt", -1, -1, w.side(), d, 0});
}

template <class T>
Task tf(const Matrix<T>& m, const Tensor<T>& t, int s1, int s2, FlattenOrder order, const KernelConfig& cfg) {
  return flatten_task(m, t, s1, s2, order, true, cfg);
}

template <class T>
Task td(const Tensor<T>& t, const Matrix<T>& m, int s1, int s2, FlattenOrder order, const KernelConfig& cfg) {
  return flatten_task(m, t, s1, s2, order, false, cfg);
}

#define SPT_INSTANTIATE_LAYOUT(T)                                                                        \
  template Task tt<T>(const Tensor<T>&, const Tensor<T>&, const RankVector&, const KernelConfig&);        \
  template Task tf<T>(const Matrix<T>&, const Tensor<T>&, int, int, FlattenOrder, const KernelConfig&);   \
  template Task td<T>(const Tensor<T>&, const Matrix<T>&, int, int, FlattenOrder, const KernelConfig&);

SPT_INSTANTIATE_LAYOUT(ModP)
SPT_INSTANTIATE_LAYOUT(double)

}  // namespace spt
