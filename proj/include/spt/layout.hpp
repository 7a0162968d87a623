#pragma once

#include "spt/config.hpp"
#include "spt/linearize.hpp"
#include "spt/matrix.hpp"
#include "spt/task.hpp"
#include "spt/tensor.hpp"

namespace spt {

/// Bijection between a tensor with s1 + s2 axes and an n^s1 x n^s2 matrix.
enum class FlattenOrder : std::uint8_t {
  /// Recursive orthant order: per level, the row block is the linearized
  /// halves of the first s1 axes and the column block those of the rest.
  morton,
  /// Plain row-major grouping of the first s1 and last s2 axes.
  row_major,
};

/// Tensor transposition: W[y_1..y_d] = R[y_{r_1}..y_{r_d}], i.e. axis a of R
/// lands on axis r_a of W. Recursive over orthants.
template <class T>
Task tt(const Tensor<T>& w, const Tensor<T>& r, const RankVector& ranks, const KernelConfig& cfg = {});

/// Flattens `t` (order s1 + s2) into `m` (n^s1 x n^s2).
template <class T>
Task tf(const Matrix<T>& m, const Tensor<T>& t, int s1, int s2, FlattenOrder order = FlattenOrder::morton,
        const KernelConfig& cfg = {});

/// Exact inverse of tf with the same order.
template <class T>
Task td(const Tensor<T>& t, const Matrix<T>& m, int s1, int s2, FlattenOrder order = FlattenOrder::morton,
        const KernelConfig& cfg = {});

/// Matrix cell (row, col) that tf assigns to a tensor coordinate.
std::pair<index_t, index_t> flatten_cell(std::span<const index_t> coords, int s1, index_t side, FlattenOrder order);

}  // namespace spt
