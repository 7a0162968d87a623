#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "spt/config.hpp"
#include "spt/error.hpp"
#include "spt/matrix.hpp"
#include "spt/storage.hpp"

namespace spt {

inline constexpr int kMaxOrder = 12;

using AxisStrides = std::array<index_t, kMaxOrder>;

/// Hypercube tensor view: `order` axes, each of extent `side`, addressed by
/// per-axis strides from an offset in a Storage buffer.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(Storage<T>* storage, int order, index_t side, index_t offset, const AxisStrides& strides)
      : storage_(storage), order_(order), side_(side), offset_(offset), strides_(strides) {}

  Storage<T>* storage() const { return storage_; }
  int order() const { return order_; }
  index_t side() const { return side_; }
  index_t offset() const { return offset_; }
  index_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  const AxisStrides& strides() const { return strides_; }
  index_t size() const { return ipow(side_, order_); }

  /// True when the view covers its buffer densely in row-major order.
  bool contiguous() const {
    index_t expect = 1;
    for (int a = order_ - 1; a >= 0; --a) {
      if (strides_[static_cast<std::size_t>(a)] != expect) return false;
      expect *= side_;
    }
    return true;
  }

  index_t index(std::span<const index_t> idx) const {
    index_t at = offset_;
    for (int a = 0; a < order_; ++a) at += idx[static_cast<std::size_t>(a)] * strides_[static_cast<std::size_t>(a)];
    return at;
  }
  T& operator[](std::span<const index_t> idx) const { return storage_->data()[index(idx)]; }

  /// Orthant by 1-based half selectors, one per axis.
  Tensor orthant(std::span<const int> halves) const {
    if (static_cast<int>(halves.size()) != order_) {
      throw Error(Errc::shape_mismatch, "orthant selector length differs from tensor order");
    }
    std::uint32_t mask = 0;
    for (int a = 0; a < order_; ++a) {
      const int h = halves[static_cast<std::size_t>(a)];
      if (h != 1 && h != 2) throw Error(Errc::invalid_argument, "orthant selectors must be 1 or 2");
      if (h == 2) mask |= 1u << a;
    }
    return orthant_mask(mask);
  }

  /// Orthant by bitmask: bit a set selects the upper half of axis a.
  Tensor orthant_mask(std::uint32_t mask) const {
    if (side_ < 2) throw Error(Errc::degenerate_split, "orthant of a tensor with unit side");
    const index_t half = side_ / 2;
    index_t off = offset_;
    for (int a = 0; a < order_; ++a) {
      if ((mask >> a) & 1u) off += half * strides_[static_cast<std::size_t>(a)];
    }
    return Tensor(storage_, order_, half, off, strides_);
  }

  Tensor shifted(index_t delta) const { return Tensor(storage_, order_, side_, offset_ + delta, strides_); }

  /// Dense tensors reinterpreted as a (side^(order-1)) x side row-major matrix.
  Matrix<T> as_matrix() const {
    if (!contiguous()) throw Error(Errc::shape_mismatch, "as_matrix requires a dense tensor");
    if (order_ == 0) return Matrix<T>(storage_, offset_, 1, 1, 1);
    return Matrix<T>(storage_, offset_, size() / side_, side_, side_);
  }

 private:
  Storage<T>* storage_ = nullptr;
  int order_ = 0;
  index_t side_ = 1;
  index_t offset_ = 0;
  AxisStrides strides_{};
};

inline AxisStrides row_major_strides(int order, index_t side) {
  AxisStrides s{};
  index_t acc = 1;
  for (int a = order - 1; a >= 0; --a) {
    s[static_cast<std::size_t>(a)] = acc;
    acc *= side;
  }
  return s;
}

template <class T>
Tensor<T> make_tensor(Workspace& ws, int order, index_t side, std::string name = "T") {
  if (order < 0 || order > kMaxOrder) throw Error(Errc::invalid_argument, "tensor order out of range");
  if (!is_pow2(side)) throw Error(Errc::shape_mismatch, "tensor side must be a power of two");
  auto* s = ws.create<T>(ipow(side, order), std::move(name));
  return Tensor<T>(s, order, side, 0, row_major_strides(order, side));
}

}  // namespace spt
