#pragma once

// Serial base-case kernels shared by the kernel builders.

#include <memory>

#include "spt/matrix.hpp"
#include "spt/planes.hpp"
#include "spt/task.hpp"

namespace spt::detail {

/// X += U * V over rectangular views.
template <class T>
class MatMulLeaf final : public Leaf {
 public:
  MatMulLeaf(Matrix<T> x, Matrix<T> u, Matrix<T> v) : x_(x), u_(u), v_(v) {}

  void run() override {
    for (index_t i = 0; i < x_.rows(); ++i) {
      for (index_t j = 0; j < x_.cols(); ++j) {
        T s = x_(i, j);
        for (index_t k = 0; k < u_.cols(); ++k) s += u_(i, k) * v_(k, j);
        x_(i, j) = s;
      }
    }
  }

  void accesses(AccessSink& sink) const override {
    const buffer_id bx = x_.storage()->id();
    const buffer_id bu = u_.storage()->id();
    const buffer_id bv = v_.storage()->id();
    for (index_t i = 0; i < x_.rows(); ++i) {
      for (index_t j = 0; j < x_.cols(); ++j) {
        sink.on_access(bx, static_cast<std::uint64_t>(x_.index(i, j)), false);
        for (index_t k = 0; k < u_.cols(); ++k) {
          sink.on_access(bu, static_cast<std::uint64_t>(u_.index(i, k)), false);
          sink.on_access(bv, static_cast<std::uint64_t>(v_.index(k, j)), false);
        }
        sink.on_access(bx, static_cast<std::uint64_t>(x_.index(i, j)), true);
      }
    }
  }

  LeafCost cost() const override {
    const std::int64_t m = x_.rows() * x_.cols() * u_.cols();
    return {m, m, m};
  }

 private:
  Matrix<T> x_, u_, v_;
};

/// X += Y over one row segment.
template <class T>
class AddLeaf final : public Leaf {
 public:
  AddLeaf(Matrix<T> x, Matrix<T> y) : x_(x), y_(y) {}

  void run() override {
    for (index_t i = 0; i < x_.rows(); ++i)
      for (index_t j = 0; j < x_.cols(); ++j) x_(i, j) += y_(i, j);
  }

  void accesses(AccessSink& sink) const override {
    for (index_t i = 0; i < x_.rows(); ++i) {
      for (index_t j = 0; j < x_.cols(); ++j) {
        const auto xi = static_cast<std::uint64_t>(x_.index(i, j));
        sink.on_access(x_.storage()->id(), xi, false);
        sink.on_access(y_.storage()->id(), static_cast<std::uint64_t>(y_.index(i, j)), false);
        sink.on_access(x_.storage()->id(), xi, true);
      }
    }
  }

  LeafCost cost() const override {
    const std::int64_t s = x_.size();
    return {s, s, 0};
  }

 private:
  Matrix<T> x_, y_;
};

/// X^[0] <- X^[0] + ... + X^[r-1] over one block, through a block-local sum.
/// Cost: B*r work, B + ceil(log2 r) span.
template <class T>
class ReduceLeaf final : public Leaf {
 public:
  explicit ReduceLeaf(MatrixPlanes<T> planes) : planes_(planes) {}

  void run() override {
    const Matrix<T> out = planes_.plane(0);
    std::vector<T> sum(static_cast<std::size_t>(out.size()), T{});
    for (int k = 0; k < planes_.count(); ++k) {
      const Matrix<T> p = planes_.plane(k);
      std::size_t e = 0;
      for (index_t i = 0; i < p.rows(); ++i)
        for (index_t j = 0; j < p.cols(); ++j) sum[e++] += p(i, j);
    }
    std::size_t e = 0;
    for (index_t i = 0; i < out.rows(); ++i)
      for (index_t j = 0; j < out.cols(); ++j) out(i, j) = sum[e++];
  }

  void accesses(AccessSink& sink) const override {
    for (int k = 0; k < planes_.count(); ++k) {
      const Matrix<T> p = planes_.plane(k);
      for (index_t i = 0; i < p.rows(); ++i)
        for (index_t j = 0; j < p.cols(); ++j)
          sink.on_access(p.storage()->id(), static_cast<std::uint64_t>(p.index(i, j)), false);
    }
    const Matrix<T> out = planes_.plane(0);
    for (index_t i = 0; i < out.rows(); ++i)
      for (index_t j = 0; j < out.cols(); ++j)
        sink.on_access(out.storage()->id(), static_cast<std::uint64_t>(out.index(i, j)), true);
  }

  LeafCost cost() const override {
    const std::int64_t len = planes_.plane(0).size();
    const std::int64_t r = planes_.count();
    return {len * r, len + log2_ceil(static_cast<std::uint64_t>(r)), 0};
  }

 private:
  MatrixPlanes<T> planes_;
};

/// dst[d0 + e*dst_step] <- src[s0 + e*src_step] for e < count.
template <class T>
class CopyLeaf final : public Leaf {
 public:
  CopyLeaf(Storage<T>* dst, index_t d0, index_t dst_step, Storage<T>* src, index_t s0, index_t src_step,
           index_t count)
      : dst_(dst), src_(src), d0_(d0), s0_(s0), dst_step_(dst_step), src_step_(src_step), count_(count) {}

  void run() override {
    T* d = dst_->data();
    const T* s = src_->data();
    for (index_t e = 0; e < count_; ++e) d[d0_ + e * dst_step_] = s[s0_ + e * src_step_];
  }

  void accesses(AccessSink& sink) const override {
    for (index_t e = 0; e < count_; ++e) {
      sink.on_access(src_->id(), static_cast<std::uint64_t>(s0_ + e * src_step_), false);
      sink.on_access(dst_->id(), static_cast<std::uint64_t>(d0_ + e * dst_step_), true);
    }
  }

  LeafCost cost() const override { return {count_, count_, 0}; }

 private:
  Storage<T>* dst_;
  Storage<T>* src_;
  index_t d0_, s0_, dst_step_, src_step_, count_;
};

template <class L, class... Args>
Task make_leaf(Args&&... args) {
  return Task::leaf(std::make_unique<L>(std::forward<Args>(args)...));
}

/// Parallel-for over rows and ceil(cols/B) blocks, one leaf per block.
template <class MakeBlockLeaf>
Task row_block_loop(index_t rows, index_t cols, index_t block, MakeBlockLeaf&& make) {
  const index_t len = std::min(block, cols);
  const index_t blocks = (cols + len - 1) / len;
  std::vector<Task> row_tasks;
  row_tasks.reserve(static_cast<std::size_t>(rows));
  for (index_t i = 0; i < rows; ++i) {
    std::vector<Task> block_tasks;
    block_tasks.reserve(static_cast<std::size_t>(blocks));
    for (index_t jb = 0; jb < blocks; ++jb) block_tasks.push_back(make(i, jb * len, len));
    row_tasks.push_back(Task::parallel_for(std::move(block_tasks)));
  }
  return Task::parallel_for(std::move(row_tasks));
}

}  // namespace spt::detail
