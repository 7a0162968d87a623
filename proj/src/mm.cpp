#include "spt/mm.hpp"

#include <sstream>
#include <utility>
#include <vector>

#include "leaves.hpp"
#include "spt/error.hpp"
#include "spt/scalar.hpp"

namespace spt {

namespace {

template <class T>
void check_square(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v) {
  const index_t n = x.rows();
  if (!is_pow2(n) || x.cols() != n || u.rows() != n || u.cols() != n || v.rows() != n || v.cols() != n) {
    throw Error(Errc::shape_mismatch, "square MM needs equal power-of-two sides");
  }
}

template <class T>
void check_whole(const Matrix<T>& x) {
  if (x.empty() || x.offset() != 0 || x.stride() != x.cols() || x.size() != x.storage()->size()) {
    throw Error(Errc::invalid_argument, "output must be a whole dense buffer");
  }
}

Task fork_call(std::vector<Task> children) { return Task::fork(std::move(children)).as_call(); }

}  // namespace

void check_plane_count(index_t n, int r) {
  if (r < 1 || !is_pow2(r) || r > n) {
    throw Error(Errc::invalid_planes, "plane count must be a power of two in [1, n]");
  }
}

template <class T>
void mm_loop(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v) {
  if (u.cols() != v.rows() || x.rows() != u.rows() || x.cols() != v.cols()) {
    throw Error(Errc::shape_mismatch, "mm_loop: non-conforming shapes");
  }
  detail::MatMulLeaf<T>(x, u, v).run();
}

template <class T>
Task mm(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  check_square(x, u, v);
  if (x.rows() <= cfg.mm_base) return detail::make_leaf<detail::MatMulLeaf<T>>(x, u, v);
  using Q = Quadrant;
  std::vector<Task> first;
  first.push_back(mm(x.quadrant(Q::q11), u.quadrant(Q::q11), v.quadrant(Q::q11), cfg));
  first.push_back(mm(x.quadrant(Q::q12), u.quadrant(Q::q11), v.quadrant(Q::q12), cfg));
  first.push_back(mm(x.quadrant(Q::q21), u.quadrant(Q::q21), v.quadrant(Q::q11), cfg));
  first.push_back(mm(x.quadrant(Q::q22), u.quadrant(Q::q21), v.quadrant(Q::q12), cfg));
  std::vector<Task> second;
  second.push_back(mm(x.quadrant(Q::q11), u.quadrant(Q::q12), v.quadrant(Q::q21), cfg));
  second.push_back(mm(x.quadrant(Q::q12), u.quadrant(Q::q12), v.quadrant(Q::q22), cfg));
  second.push_back(mm(x.quadrant(Q::q21), u.quadrant(Q::q22), v.quadrant(Q::q21), cfg));
  second.push_back(mm(x.quadrant(Q::q22), u.quadrant(Q::q22), v.quadrant(Q::q22), cfg));
  std::vector<Task> rounds;
  rounds.push_back(Task::fork(std::move(first)));
  rounds.push_back(Task::fork(std::move(second)));
  return Task::sequence(std::move(rounds)).as_call().tagged({"mm", 0, 0, x.rows(), x.rows(), x.rows()});
}

template <class T>
Task mm_reduce2(const Matrix<T>& x, const Matrix<T>& y, const KernelConfig& cfg) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw Error(Errc::shape_mismatch, "mm_reduce2: shape mismatch");
  if (cfg.block < 1) throw Error(Errc::config, "block size must be positive");
  return detail::row_block_loop(x.rows(), x.cols(), cfg.block, [&](index_t i, index_t j0, index_t len) {
    return detail::make_leaf<detail::AddLeaf<T>>(x.block(i, j0, 1, len), y.block(i, j0, 1, len));
  });
}

template <class T>
Task mm_reduce_r(const MatrixPlanes<T>& planes, const KernelConfig& cfg) {
  if (planes.count() <= 1) return Task{};
  if (cfg.block < 1) throw Error(Errc::config, "block size must be positive");
  const Matrix<T> p0 = planes.plane(0);
  return detail::row_block_loop(p0.rows(), p0.cols(), cfg.block, [&](index_t i, index_t j0, index_t len) {
    return detail::make_leaf<detail::ReduceLeaf<T>>(
        planes.map([&](const Matrix<T>& m) { return m.block(i, j0, 1, len); }));
  });
}

template <class T>
Task mm_hd_rec(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int lo, int hi,
               const KernelConfig& cfg) {
  check_square(x, u, v);
  if (lo == hi) return mm(x, u, v, cfg);
  if (x.rows() < 2 || hi - lo + 1 > x.rows()) throw Error(Errc::invalid_planes, "plane budget exceeds matrix side");
  const int m = (lo + hi) / 2;
  auto* ys = ws.create<T>(x.size(), "Y", false);
  const Matrix<T> y(ys, 0, x.rows(), x.cols(), x.cols());
  using Q = Quadrant;
  std::vector<Task> kids;
  kids.push_back(mm_hd_rec(ws, x.quadrant(Q::q11), u.quadrant(Q::q11), v.quadrant(Q::q11), lo, m, cfg));
  kids.push_back(mm_hd_rec(ws, x.quadrant(Q::q12), u.quadrant(Q::q11), v.quadrant(Q::q12), lo, m, cfg));
  kids.push_back(mm_hd_rec(ws, x.quadrant(Q::q21), u.quadrant(Q::q21), v.quadrant(Q::q11), lo, m, cfg));
  kids.push_back(mm_hd_rec(ws, x.quadrant(Q::q22), u.quadrant(Q::q21), v.quadrant(Q::q12), lo, m, cfg));
  kids.push_back(mm_hd_rec(ws, y.quadrant(Q::q11), u.quadrant(Q::q12), v.quadrant(Q::q21), m + 1, hi, cfg));
  kids.push_back(mm_hd_rec(ws, y.quadrant(Q::q12), u.quadrant(Q::q12), v.quadrant(Q::q22), m + 1, hi, cfg));
  kids.push_back(mm_hd_rec(ws, y.quadrant(Q::q21), u.quadrant(Q::q22), v.quadrant(Q::q21), m + 1, hi, cfg));
  kids.push_back(mm_hd_rec(ws, y.quadrant(Q::q22), u.quadrant(Q::q22), v.quadrant(Q::q22), m + 1, hi, cfg));
  std::vector<Task> steps;
  steps.push_back(Task::alloc(ys));
  steps.push_back(Task::fork(std::move(kids)));
  steps.push_back(mm_reduce2(x, y, cfg));
  steps.push_back(Task::dealloc(ys));
  return Task::sequence(std::move(steps)).as_call().tagged({"mm-hd'", lo, hi, x.rows(), x.rows(), x.rows()});
}

template <class T>
Task mm_opt_rec(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  const int lo = planes.lo();
  const int hi = planes.hi();
  const Matrix<T> x = planes.plane(lo);
  check_square(x, u, v);
  if (lo == hi) return mm(x, u, v, cfg);
  if (x.rows() < 2 || planes.active() > x.rows()) throw Error(Errc::invalid_planes, "plane range exceeds matrix side");
  const int m = (lo + hi) / 2;
  // Fault hook: both groups share the low half.
  const int hlo = cfg.inject_plane_overlap ? lo : m + 1;
  const int hhi = cfg.inject_plane_overlap ? m : hi;
  using Q = Quadrant;
  auto quad = [&](Q q, int a, int b) {
    return planes.map([q](const Matrix<T>& p) { return p.quadrant(q); }).range(a, b);
  };
  std::vector<Task> kids;
  kids.push_back(mm_opt_rec(quad(Q::q11, lo, m), u.quadrant(Q::q11), v.quadrant(Q::q11), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q12, lo, m), u.quadrant(Q::q11), v.quadrant(Q::q12), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q21, lo, m), u.quadrant(Q::q21), v.quadrant(Q::q11), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q22, lo, m), u.quadrant(Q::q21), v.quadrant(Q::q12), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q11, hlo, hhi), u.quadrant(Q::q12), v.quadrant(Q::q21), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q12, hlo, hhi), u.quadrant(Q::q12), v.quadrant(Q::q22), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q21, hlo, hhi), u.quadrant(Q::q22), v.quadrant(Q::q21), cfg));
  kids.push_back(mm_opt_rec(quad(Q::q22, hlo, hhi), u.quadrant(Q::q22), v.quadrant(Q::q22), cfg));
  return fork_call(std::move(kids)).tagged({"mm-opt'", lo, hi, x.rows(), x.rows(), x.rows()});
}

template <class T>
Program mm_program(const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  check_whole(x);
  Program p;
  p.root = mm(x, u, v, cfg);
  p.zero_on_entry = {x.storage()};
  p.resident_space = x.size();
  return p;
}

template <class T>
Program mm_hd(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
              const KernelConfig& cfg) {
  check_square(x, u, v);
  check_whole(x);
  check_plane_count(x.rows(), r);
  Program p;
  p.root = mm_hd_rec(ws, x, u, v, 0, r - 1, cfg);
  p.zero_on_entry = {x.storage()};
  p.resident_space = x.size();
  return p;
}

template <class T>
Program mm_opt(const MatrixPlanes<T>& planes, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  const Matrix<T> head = planes.plane(0);
  check_square(head, u, v);
  check_plane_count(head.rows(), planes.count());
  if (planes.lo() != 0 || planes.hi() != planes.count() - 1) {
    throw Error(Errc::invalid_planes, "driver needs the full plane range");
  }
  check_whole(head);
  Program p;
  std::vector<Task> steps;
  steps.push_back(mm_opt_rec(planes, u, v, cfg));
  steps.push_back(mm_reduce_r(planes, cfg));
  p.root = Task::sequence(std::move(steps));
  p.zero_on_entry = {head.storage()};
  if (planes.count() > 1 && planes.plane(1).storage() != head.storage()) {
    p.zero_on_entry.push_back(planes.plane(1).storage());
  }
  p.resident_space = head.size() * planes.count();
  return p;
}

template <class T>
Program mm_opt(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, int r,
               const KernelConfig& cfg) {
  check_square(x, u, v);
  check_plane_count(x.rows(), r);
  return mm_opt(make_matrix_planes(ws, x, r), u, v, cfg);
}

template <class T>
Program mm_nd(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  return mm_hd(ws, x, u, v, static_cast<int>(x.rows()), cfg);
}

template <class T>
Program mm_ns(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v, const KernelConfig& cfg) {
  return mm_opt(ws, x, u, v, static_cast<int>(x.rows()), cfg);
}

std::string TradeoffChoice::describe() const {
  std::ostringstream os;
  if (planes == 1) {
    os << "mm (1 plane)";
  } else {
    os << "mm-opt (" << planes << " planes)";
  }
  if (rounded) os << ", band r=" << band << " rounded down";
  if (clamped) os << ", clamped to n";
  return os.str();
}

TradeoffChoice mm_tradeoff_choice(index_t n, std::int64_t processors) {
  if (!is_pow2(n)) throw Error(Errc::shape_mismatch, "side must be a power of two");
  if (processors < 1) throw Error(Errc::invalid_argument, "processor count must be positive");
  TradeoffChoice c;
  const std::int64_t area = n * n;
  if (processors <= area) return c;
  std::int64_t band = (processors + area - 1) / area;
  c.band = band;
  if (band > n) {
    band = n;
    c.clamped = true;
  }
  c.planes = static_cast<int>(floor_pow2(band));
  c.rounded = c.planes != band;
  return c;
}

template <class T>
Program mm_tradeoff(Workspace& ws, const Matrix<T>& x, const Matrix<T>& u, const Matrix<T>& v,
                    std::int64_t processors, const KernelConfig& cfg, TradeoffChoice* choice) {
  check_square(x, u, v);
  const TradeoffChoice c = mm_tradeoff_choice(x.rows(), processors);
  if (choice != nullptr) *choice = c;
  if (c.planes == 1) return mm_program(x, u, v, cfg);
  return mm_opt(ws, x, u, v, c.planes, cfg);
}

#define SPT_INSTANTIATE_MM(T)                                                                                  \
  template void mm_loop<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&);                              \
  template Task mm<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&);              \
  template Task mm_reduce2<T>(const Matrix<T>&, const Matrix<T>&, const KernelConfig&);                        \
  template Task mm_reduce_r<T>(const MatrixPlanes<T>&, const KernelConfig&);                                   \
  template Task mm_hd_rec<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, int, int,       \
                             const KernelConfig&);                                                             \
  template Task mm_opt_rec<T>(const MatrixPlanes<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&); \
  template Program mm_program<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&);   \
  template Program mm_hd<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, int,             \
                            const KernelConfig&);                                                              \
  template Program mm_opt<T>(const MatrixPlanes<T>&, const Matrix<T>&, const Matrix<T>&, const KernelConfig&); \
  template Program mm_opt<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, int,            \
                             const KernelConfig&);                                                             \
  template Program mm_nd<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&,                  \
                            const KernelConfig&);                                                              \
  template Program mm_ns<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&,                  \
                            const KernelConfig&);                                                              \
  template Program mm_tradeoff<T>(Workspace&, const Matrix<T>&, const Matrix<T>&, const Matrix<T>&,            \
                                  std::int64_t, const KernelConfig&, TradeoffChoice*);

SPT_INSTANTIATE_MM(ModP)
SPT_INSTANTIATE_MM(double)

}  // namespace spt
