#pragma once

#include <string>

#include "spt/config.hpp"
#include "spt/error.hpp"
#include "spt/storage.hpp"

namespace spt {

enum class Quadrant { q11, q12, q21, q22 };

/// Non-owning row-major view into a Storage buffer. Copies are shallow and
/// writes through any view land in the parent buffer.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(Storage<T>* storage, index_t offset, index_t rows, index_t cols, index_t stride)
      : storage_(storage), offset_(offset), rows_(rows), cols_(cols), stride_(stride) {}

  Storage<T>* storage() const { return storage_; }
  index_t offset() const { return offset_; }
  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t stride() const { return stride_; }
  index_t size() const { return rows_ * cols_; }
  bool empty() const { return storage_ == nullptr; }

  index_t index(index_t i, index_t j) const { return offset_ + i * stride_ + j; }
  T& operator()(index_t i, index_t j) const { return storage_->data()[index(i, j)]; }

  Matrix quadrant(Quadrant q) const {
    if (rows_ < 2 || cols_ < 2) {
      throw Error(Errc::degenerate_split, "quadrant of a matrix with a unit side");
    }
    const index_t hr = rows_ / 2;
    const index_t hc = cols_ / 2;
    switch (q) {
      case Quadrant::q11: return block(0, 0, hr, hc);
      case Quadrant::q12: return block(0, hc, hr, hc);
      case Quadrant::q21: return block(hr, 0, hr, hc);
      case Quadrant::q22: return block(hr, hc, hr, hc);
    }
    return {};
  }

  Matrix top() const { return split_rows(0); }
  Matrix bottom() const { return split_rows(1); }
  Matrix left() const { return split_cols(0); }
  Matrix right() const { return split_cols(1); }

  Matrix block(index_t r0, index_t c0, index_t nr, index_t nc) const {
    return Matrix(storage_, index(r0, c0), nr, nc, stride_);
  }

  /// Same shape, shifted by `delta` elements in the parent buffer.
  Matrix shifted(index_t delta) const { return Matrix(storage_, offset_ + delta, rows_, cols_, stride_); }

 private:
  Matrix split_rows(int half) const {
    if (rows_ < 2) throw Error(Errc::degenerate_split, "row split of a single-row matrix");
    return block(half * (rows_ / 2), 0, rows_ / 2, cols_);
  }
  Matrix split_cols(int half) const {
    if (cols_ < 2) throw Error(Errc::degenerate_split, "column split of a single-column matrix");
    return block(0, half * (cols_ / 2), rows_, cols_ / 2);
  }

  Storage<T>* storage_ = nullptr;
  index_t offset_ = 0;
  index_t rows_ = 0;
  index_t cols_ = 0;
  index_t stride_ = 0;
};

template <class T>
Matrix<T> make_matrix(Workspace& ws, index_t rows, index_t cols, std::string name = "M") {
  if (!is_pow2(rows) || !is_pow2(cols)) {
    throw Error(Errc::shape_mismatch, "matrix extents must be powers of two");
  }
  auto* s = ws.create<T>(rows * cols, std::move(name));
  return Matrix<T>(s, 0, rows, cols, cols);
}

}  // namespace spt
