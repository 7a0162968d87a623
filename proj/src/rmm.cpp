#include "spt/rmm.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "leaves.hpp"
#include "spt/error.hpp"
#include "spt/mm.hpp"
#include "spt/scalar.hpp"

namespace spt {

namespace {

enum class Split { a, b, c };

Split pick_split(index_t a, index_t b, index_t c) {
  if (a >= std::max(b, c)) return Split::a;
  if (b >= std::max(a, c)) return Split::b;
  return Split::c;
}

template <class T>
void check_shapes(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v) {
  if (u.cols() != v.rows() || x.rows() != u.rows() || x.cols() != v.cols()) {
    throw Error(Errc::shape_mismatch, "rmm: non-conforming shapes");
  }
  if (!is_pow2(u.rows()) || !is_pow2(u.cols()) || !is_pow2(v.cols())) {
    throw Error(Errc::shape_mismatch, "rmm: extents must be powers of two");
  }
}

template <class T>
Task pair(Task first, Task second, bool parallel) {
  std::vector<Task> kids;
  kids.push_back(std::move(first));
  kids.push_back(std::move(second));
  return parallel ? Task::fork(std::move(kids)) : Task::sequence(std::move(kids));
}

}  // namespace

template <class T>
Task rmm(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  check_shapes(x, u, v);
  const index_t a = u.rows();
  const index_t b = u.cols();
  const index_t c = v.cols();
  const TaskTag tag{"rmm", -1, -1, a, b, c};
  if (a <= cfg.mm_base && b <= cfg.mm_base && c <= cfg.mm_base) {
    return detail::make_leaf<detail::MatMulLeaf<T>>(x, u, v).tagged(tag);
  }
  Task t;
  switch (pick_split(a, b, c)) {
    case Split::a:
      t = pair<T>(rmm(x.top(), u.top(), v, cfg), rmm(x.bottom(), u.bottom(), v, cfg), true);
      break;
    case Split::b:
      t = pair<T>(rmm(x, u.left(), v.top(), cfg), rmm(x, u.right(), v.bottom(), cfg), false);
      break;
    case Split::c:
      t = pair<T>(rmm(x.left(), u, v.left(), cfg), rmm(x.right(), u, v.right(), cfg), true);
      break;
  }
  return std::move(t).as_call().tagged(tag);
}

template <class T>
Task rmm_opt_rec(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  const int lo = planes.lo();
  const int hi = planes.hi();
  const Matrix<T> x = planes.plane(lo);
  check_shapes(x, u, v);
  if (lo == hi) return rmm(x, u, v, cfg);
  const index_t a = u.rows();
  const index_t b = u.cols();
  const index_t c = v.cols();
  if (planes.active() > b) throw Error(Errc::invalid_planes, "more planes than the inner dimension");
  Task t;
  switch (pick_split(a, b, c)) {
    case Split::a: {
      auto top = planes.map([](const Matrix<T>& p) { return p.top(); });
      auto bottom = planes.map([](const Matrix<T>& p) { return p.bottom(); });
      t = pair<T>(rmm_opt_rec(top, u.top(), v, cfg), rmm_opt_rec(bottom, u.bottom(), v, cfg), true);
      break;
    }
    case Split::b: {
      const int m = (lo + hi) / 2;
      const int hlo = cfg.inject_plane_overlap ? lo : m + 1;
      const int hhi = cfg.inject_plane_overlap ? m : hi;
      t = pair<T>(rmm_opt_rec(planes.range(lo, m), u.left(), v.top(), cfg),
                  rmm_opt_rec(planes.range(hlo, hhi), u.right(), v.bottom(), cfg), true);
      break;
    }
    case Split::c: {
      auto left = planes.map([](const Matrix<T>& p) { return p.left(); });
      auto right = planes.map([](const Matrix<T>& p) { return p.right(); });
      t = pair<T>(rmm_opt_rec(left, u, v.left(), cfg), rmm_opt_rec(right, u, v.right(), cfg), true);
      break;
    }
  }
  return std::move(t).as_call().tagged({"rmm-opt'", lo, hi, a, b, c});
}

template <class T>
Program rmm_opt(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  const Matrix<T> head = planes.plane(0);
  check_shapes(head, u, v);
  const int r = planes.count();
  if (r < 1 || !is_pow2(r) || r > u.cols()) {
    throw Error(Errc::invalid_planes, "plane count must be a power of two in [1, b]");
  }
  if (planes.lo() != 0 || planes.hi() != r - 1) throw Error(Errc::invalid_planes, "driver needs the full plane range");
  if (head.offset() != 0 || head.stride() != head.cols() || head.size() != head.storage()->size()) {
    throw Error(Errc::invalid_argument, "output must be a whole dense buffer");
  }
  Program p;
  std::vector<Task> steps;
  steps.push_back(rmm_opt_rec(planes, u, v, cfg));
  steps.push_back(mm_reduce_r(planes, cfg));
  p.root = Task::sequence(std::move(steps));
  p.zero_on_entry = {head.storage()};
  if (r > 1 && planes.plane(1).storage() != head.storage()) p.zero_on_entry.push_back(planes.plane(1).storage());
  p.resident_space = head.size() * r;
  return p;
}

template <class T>
Program rmm_opt(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
                const KernelConfig& cfg) {
  check_shapes(x, u, v);
  if (r < 1 || !is_pow2(r) || r > u.cols()) {
    throw Error(Errc::invalid_planes, "plane count must be a power of two in [1, b]");
  }
  return rmm_opt(make_matrix_planes(ws, x, r), u, v, cfg);
}

#define SPT_INSTANTIATE_RMM(T)                                                                                  \
  template Task rmm<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&);              \
  template Task rmm_opt_rec<T>(const MatrixPlanes<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&); \
  template Program rmm_opt<T>(const MatrixPlanes<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&); \
  template Program rmm_opt<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, int,            \
                              const KernelConfig&);

SPT_INSTANTIATE_RMM(ModP)
SPT_INSTANTIATE_RMM(double)

}  // namespace spt
