#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spt/contraction.hpp"
#include "spt/matrix.hpp"
#include "spt/random.hpp"
#include "spt/task.hpp"
#include "spt/tensor.hpp"

namespace spt::test {

template <class T>
std::vector<T> snapshot(const Matrix<T>& m) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

inline std::vector<index_t> unrank(index_t code, int order, index_t side) {
  std::vector<index_t> idx(static_cast<std::size_t>(order));
  for (int a = order - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = code % side;
    code /= side;
  }
  return idx;
}

template <class T>
std::vector<T> snapshot(const Tensor<T>& t) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(t.size()));
  for (index_t e = 0; e < t.size(); ++e) out.push_back(t[unrank(e, t.order(), t.side())]);
  return out;
}

template <class T>
void randomize(const Matrix<T>& m, std::uint64_t seed) {
  Rng rng(seed);
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t j = 0; j < m.cols(); ++j) m(i, j) = random_scalar<T>(rng);
}

template <class T>
void randomize(const Tensor<T>& t, std::uint64_t seed) {
  Rng rng(seed);
  for (index_t e = 0; e < t.size(); ++e) t[unrank(e, t.order(), t.side())] = random_scalar<T>(rng);
}

// Plain triple loop, row-major result of u (a x b) times v (b x c).
template <class T>
std::vector<T> oracle_mm(const Matrix<T>& u, const Matrix<T>& v) {
  std::vector<T> out(static_cast<std::size_t>(u.rows() * v.cols()), T{});
  for (index_t i = 0; i < u.rows(); ++i)
    for (index_t j = 0; j < v.cols(); ++j) {
      T acc{};
      for (index_t k = 0; k < u.cols(); ++k) acc += u(i, k) * v(k, j);
      out[static_cast<std::size_t>(i * v.cols() + j)] = acc;
    }
  return out;
}

// Nested sum straight from the labels: X[i.., j..] = sum_k U[labels] * V[labels].
template <class T>
std::vector<T> oracle_tc(const ContractionSpec& spec, const Tensor<T>& u, const Tensor<T>& v) {
  const index_t n = u.side();
  const int xo = spec.u + spec.v;
  const index_t xsize = ipow(n, xo);
  const index_t ksize = ipow(n, spec.x);
  std::vector<T> out(static_cast<std::size_t>(xsize), T{});
  auto pick = [&](const AxisLabel& l, const std::vector<index_t>& xi, const std::vector<index_t>& ki) {
    switch (l.group) {
      case AxisGroup::i: return xi[static_cast<std::size_t>(l.pos - 1)];
      case AxisGroup::j: return xi[static_cast<std::size_t>(spec.u + l.pos - 1)];
      case AxisGroup::k: return ki[static_cast<std::size_t>(l.pos - 1)];
    }
    return index_t{0};
  };
  for (index_t e = 0; e < xsize; ++e) {
    const auto xi = unrank(e, xo, n);
    T acc{};
    for (index_t kc = 0; kc < ksize; ++kc) {
      const auto ki = unrank(kc, spec.x, n);
      std::vector<index_t> ui, vi;
      for (const auto& l : spec.u_axes) ui.push_back(pick(l, xi, ki));
      for (const auto& l : spec.v_axes) vi.push_back(pick(l, xi, ki));
      acc += u[ui] * v[vi];
    }
    out[static_cast<std::size_t>(e)] = acc;
  }
  return out;
}

// Synthetic leaf with a fixed cost that touches chosen cells.
class ProbeLeaf final : public Leaf {
 public:
  struct Touch {
    buffer_id buffer;
    std::uint64_t index;
    bool write;
  };
  ProbeLeaf(LeafCost cost, std::vector<Touch> touches) : cost_(cost), touches_(std::move(touches)) {}
  void run() override {}
  void accesses(AccessSink& sink) const override {
    for (const auto& t : touches_) sink.on_access(t.buffer, t.index, t.write);
  }
  LeafCost cost() const override { return cost_; }

 private:
  LeafCost cost_;
  std::vector<Touch> touches_;
};

inline Task unit_leaf(std::vector<ProbeLeaf::Touch> touches = {}) {
  return Task::leaf(std::make_unique<ProbeLeaf>(LeafCost{1, 1, 0}, std::move(touches)));
}

inline std::vector<Task> unit_leaves(int k) {
  std::vector<Task> out;
  for (int i = 0; i < k; ++i) out.push_back(unit_leaf());
  return out;
}

}  // namespace spt::test
