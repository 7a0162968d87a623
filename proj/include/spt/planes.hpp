#pragma once

#include <string>

#include "spt/config.hpp"
#include "spt/error.hpp"
#include "spt/matrix.hpp"
#include "spt/tensor.hpp"

namespace spt {

/// r same-shaped accumulation targets ("planes") with an active range
/// [lo..hi]. Plane 0 is `head`; planes 1..r-1 sit at `tail + (k-1)*stride`,
/// which lets the caller's output double as plane 0 while the auxiliary
/// planes are allocated in one block.
template <class View>
class PlaneSet {
 public:
  PlaneSet() = default;
  PlaneSet(View head, View tail, index_t stride, int count)
      : head_(head), tail_(tail), stride_(stride), count_(count), lo_(0), hi_(count - 1) {}

  int count() const { return count_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int active() const { return hi_ - lo_ + 1; }
  /// Element distance between consecutive auxiliary planes.
  index_t stride() const { return stride_; }

  View plane(int k) const {
    if (k < 0 || k >= count_) throw Error(Errc::invalid_argument, "plane index out of range");
    return k == 0 ? head_ : tail_.shifted((k - 1) * stride_);
  }

  PlaneSet range(int lo, int hi) const {
    if (lo < 0 || hi >= count_ || lo > hi) throw Error(Errc::invalid_argument, "plane range out of bounds");
    PlaneSet out = *this;
    out.lo_ = lo;
    out.hi_ = hi;
    return out;
  }

  /// Applies the same sub-view selector to every plane.
  template <class F>
  PlaneSet map(F&& select) const {
    PlaneSet out = *this;
    out.head_ = select(head_);
    if (count_ > 1) out.tail_ = select(tail_);
    return out;
  }

 private:
  View head_{};
  View tail_{};
  index_t stride_ = 0;
  int count_ = 0;
  int lo_ = 0;
  int hi_ = -1;
};

template <class T>
using MatrixPlanes = PlaneSet<Matrix<T>>;
template <class T>
using TensorPlanes = PlaneSet<Tensor<T>>;

/// Planes whose plane 0 is `head` and whose r-1 auxiliary planes are one
/// freshly allocated contiguous block.
template <class T>
MatrixPlanes<T> make_matrix_planes(Workspace& ws, Matrix<T> head, int r, std::string name = "planes") {
  if (r < 1) throw Error(Errc::invalid_planes, "plane count must be positive");
  const index_t per = head.rows() * head.cols();
  if (r == 1) return MatrixPlanes<T>(head, head, per, 1);
  auto* s = ws.create<T>(per * (r - 1), std::move(name));
  Matrix<T> tail(s, 0, head.rows(), head.cols(), head.cols());
  return MatrixPlanes<T>(head, tail, per, r);
}

template <class T>
MatrixPlanes<T> make_matrix_planes(Workspace& ws, index_t rows, index_t cols, int r, std::string name = "planes") {
  if (r < 1) throw Error(Errc::invalid_planes, "plane count must be positive");
  if (!is_pow2(rows) || !is_pow2(cols)) throw Error(Errc::shape_mismatch, "plane extents must be powers of two");
  const index_t per = rows * cols;
  auto* s = ws.create<T>(per * r, std::move(name));
  Matrix<T> head(s, 0, rows, cols, cols);
  return MatrixPlanes<T>(head, head.shifted(per), per, r);
}

template <class T>
TensorPlanes<T> make_tensor_planes(Workspace& ws, Tensor<T> head, int r, std::string name = "instances") {
  if (r < 1) throw Error(Errc::invalid_planes, "instance count must be positive");
  if (!head.contiguous()) throw Error(Errc::shape_mismatch, "plane 0 must be a dense tensor");
  const index_t per = head.size();
  if (r == 1) return TensorPlanes<T>(head, head, per, 1);
  auto* s = ws.create<T>(per * (r - 1), std::move(name));
  Tensor<T> tail(s, head.order(), head.side(), 0, head.strides());
  return TensorPlanes<T>(head, tail, per, r);
}

}  // namespace spt
