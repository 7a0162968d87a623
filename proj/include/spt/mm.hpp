#pragma once

#include <cstdint>
#include <string>

#include "spt/config.hpp"
#include "spt/matrix.hpp"
#include "spt/planes.hpp"
#include "spt/storage.hpp"
#include "spt/task.hpp"

namespace spt {

/// X += U * V with a serial triple loop. Shapes must conform.
template <class T>
void mm_loop(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v);

/// In-place 2-D recursive MM: X += U * V as two parallel rounds of four.
template <class T>
Task mm(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// X += Y, parallel over rows and blocks of `cfg.block` columns.
template <class T>
Task mm_reduce2(const Matrix<T>& x, const Matrix<T>& y, const KernelConfig& cfg = {});

/// plane 0 <- sum of all planes; empty when there is a single plane.
template <class T>
Task mm_reduce_r(const MatrixPlanes<T>& planes, const KernelConfig& cfg = {});

/// Hybrid dynamic recursion over the plane budget [lo..hi]; allocates an
/// auxiliary Y per split at run time.
template <class T>
Task mm_hd_rec(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int lo, int hi,
               const KernelConfig& cfg = {});

/// Hybrid static recursion over the active plane range of `planes`.
template <class T>
Task mm_opt_rec(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// Drivers. Each returns a program computing X = U * V; outputs and planes
/// are zeroed on entry, so X must be a whole, dense buffer.
template <class T>
Program mm_program(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

template <class T>
Program mm_hd(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
              const KernelConfig& cfg = {});

template <class T>
Program mm_opt(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// Uses X as plane 0 and allocates r-1 auxiliary planes in `ws`.
template <class T>
Program mm_opt(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
               const KernelConfig& cfg = {});

template <class T>
Program mm_nd(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

template <class T>
Program mm_ns(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg = {});

/// Which kernel the processor-count dispatch picked.
struct TradeoffChoice {
  /// Planes used; 1 means plain in-place MM.
  int planes = 1;
  /// Plane count the processor band asked for before rounding and clamping.
  std::int64_t band = 1;
  bool rounded = false;
  bool clamped = false;

  std::string describe() const;
};

TradeoffChoice mm_tradeoff_choice(index_t n, std::int64_t processors);

template <class T>
Program mm_tradeoff(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v,
                    std::int64_t processors, const KernelConfig& cfg = {}, TradeoffChoice* choice = nullptr);

/// Valid plane count for an n x n hybrid kernel: power of two in [1, n].
void check_plane_count(index_t n, int r);

}  // namespace spt
