#pragma once

#include "spt/config.hpp"
#include "spt/matrix.hpp"
#include "spt/planes.hpp"
#include "spt/task.hpp"

namespace spt {

/// Rectangular in-place MM: X(a x c) += U(a x b) * V(b x c). Splits the
/// longest dimension (ties: a, then b, then c); a- and c-splits run in
/// parallel, b-splits in sequence. Every node, leaf or call, is tagged
/// "rmm" with its shape.
template <class T>
Task rmm(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// Hybrid static rectangular recursion over the active plane range; a
/// b-split hands the two halves disjoint plane sub-ranges and runs them
/// in parallel.
template <class T>
Task rmm_opt_rec(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// Computes plane 0 = U * V using every plane, then reduces.
template <class T>
Program rmm_opt(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// X = U * V through r planes, X doubling as plane 0.
template <class T>
Program rmm_opt(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
                const KernelConfig& cfg = {});

}  // namespace spt
