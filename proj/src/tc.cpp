#include "spt/tc.hpp"

#include <utility>
#include <vector>

#include "contract_leaf.hpp"
#include "leaves.hpp"
#include "spt/error.hpp"
#include "spt/mm.hpp"
#include "spt/rmm.hpp"
#include "spt/scalar.hpp"

namespace spt {

namespace {

/// Per-operand orthant masks for one global orthant (bit g = upper half of loop axis g).
struct OrthantMasks {
  std::uint32_t x = 0, u = 0, v = 0;
};

OrthantMasks split_mask(const ContractionSpec& spec, std::uint32_t global) {
  OrthantMasks m;
  m.x = global & ((1u << (spec.u + spec.v)) - 1u);
  for (std::size_t a = 0; a < spec.u_axes.size(); ++a) {
    m.u |= ((global >> spec.global_axis(spec.u_axes[a])) & 1u) << a;
  }
  for (std::size_t a = 0; a < spec.v_axes.size(); ++a) {
    m.v |= ((global >> spec.global_axis(spec.v_axes[a])) & 1u) << a;
  }
  return m;
}

/// Global mask bits for the k axes from a partition code with k_1 most significant.
std::uint32_t k_bits(const ContractionSpec& spec, std::uint32_t code) {
  std::uint32_t g = 0;
  for (int q = 0; q < spec.x; ++q) g |= ((code >> (spec.x - 1 - q)) & 1u) << (spec.u + spec.v + q);
  return g;
}

template <class T>
void check_whole(const Tensor<T>& x) {
  if (x.storage() == nullptr || x.offset() != 0 || !x.contiguous() || x.size() != x.storage()->size()) {
    throw Error(Errc::invalid_argument, "output must be a whole dense buffer");
  }
}

template <class T>
void add_zeroed(Program& p, const TensorPlanes<T>& planes) {
  p.zero_on_entry.push_back(planes.plane(0).storage());
  if (planes.count() > 1 && planes.plane(1).storage() != planes.plane(0).storage()) {
    p.zero_on_entry.push_back(planes.plane(1).storage());
  }
}

}  // namespace

template <class T>
Task tc(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
        const KernelConfig& cfg) {
  check_contraction(spec, x, u, v);
  if (x.side() == 1 || x.size() + u.size() + v.size() <= cfg.tc_base) {
    return detail::make_leaf<detail::ContractLeaf<T>>(x, u, v, spec);
  }
  const std::uint32_t outs = 1u << (spec.u + spec.v);
  std::vector<Task> steps;
  for (std::uint32_t code = 0; code < (1u << spec.x); ++code) {
    std::vector<Task> kids;
    kids.reserve(outs);
    for (std::uint32_t ij = 0; ij < outs; ++ij) {
      const OrthantMasks m = split_mask(spec, ij | k_bits(spec, code));
      kids.push_back(tc(x.orthant_mask(m.x), u.orthant_mask(m.u), v.orthant_mask(m.v), spec, cfg));
    }
    steps.push_back(Task::parallel_for(std::move(kids)));
  }
  return Task::sequence(std::move(steps)).as_call().tagged({"tc", -1, -1, x.side(), 0, 0});
}

template <class T>
Task tc_hs_rec(const TensorPlanes<T>& planes, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
               const KernelConfig& cfg) {
  const int lo = planes.lo();
  const int hi = planes.hi();
  const Tensor<T> x = planes.plane(lo);
  check_contraction(spec, x, u, v);
  if (lo == hi) return tc(x, u, v, spec, cfg);
  const int parts = 1 << spec.x;
  if (x.side() < 2 || planes.active() % parts != 0) {
    throw Error(Errc::invalid_planes, "instance range cannot be split into 2^x partitions");
  }
  const int size = planes.active() / parts;
  const std::uint32_t count = 1u << spec.w();
  std::vector<Task> kids;
  kids.reserve(count);
  for (std::uint32_t g = 0; g < count; ++g) {
    const OrthantMasks m = split_mask(spec, g);
    const int p = cfg.inject_plane_overlap ? 0 : static_cast<int>(linearize_bits(g, spec.u + spec.v, spec.x));
    auto sub = planes.map([&](const Tensor<T>& t) { return t.orthant_mask(m.x); })
                   .range(lo + p * size, lo + (p + 1) * size - 1);
    kids.push_back(tc_hs_rec(sub, u.orthant_mask(m.u), v.orthant_mask(m.v), spec, cfg));
  }
  return Task::parallel_for(std::move(kids)).as_call().tagged({"tc-hs'", lo, hi, x.side(), 0, 0});
}

template <class T>
Task tc_reduce_r(const TensorPlanes<T>& planes, const KernelConfig& cfg) {
  if (planes.count() <= 1) return Task{};
  const Matrix<T> head = planes.plane(0).as_matrix();
  const Matrix<T> tail = planes.plane(1).as_matrix();
  return mm_reduce_r(MatrixPlanes<T>(head, tail, planes.stride(), planes.count()), cfg);
}

bool valid_instance_count(index_t n, int x, std::int64_t r) {
  if (r < 1 || !is_pow2(r) || x < 1) return false;
  const int bits = log2_floor(static_cast<std::uint64_t>(r));
  return bits % x == 0 && bits / x <= log2_floor(static_cast<std::uint64_t>(n));
}

template <class T>
Program tc_program(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
                   const KernelConfig& cfg) {
  check_contraction(spec, x, u, v);
  check_whole(x);
  Program p;
  p.root = tc(x, u, v, spec, cfg);
  p.zero_on_entry = {x.storage()};
  p.resident_space = x.size();
  return p;
}

template <class T>
Program tc_hs(const TensorPlanes<T>& planes, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
              const KernelConfig& cfg) {
  const Tensor<T> head = planes.plane(0);
  check_contraction(spec, head, u, v);
  check_whole(head);
  if (!valid_instance_count(head.side(), spec.x, planes.count())) {
    throw Error(Errc::invalid_planes, "instance count must be (2^x)^i with i in [0, log2 n]");
  }
  if (planes.lo() != 0 || planes.hi() != planes.count() - 1) {
    throw Error(Errc::invalid_planes, "driver needs the full instance range");
  }
  Program p;
  std::vector<Task> steps;
  steps.push_back(tc_hs_rec(planes, u, v, spec, cfg));
  steps.push_back(tc_reduce_r(planes, cfg));
  p.root = Task::sequence(std::move(steps));
  add_zeroed(p, planes);
  p.resident_space = head.size() * planes.count();
  return p;
}

template <class T>
Program tc_hs(Workspace& ws, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
              int r, const KernelConfig& cfg) {
  check_contraction(spec, x, u, v);
  if (!valid_instance_count(x.side(), spec.x, r)) {
    throw Error(Errc::invalid_planes, "instance count must be (2^x)^i with i in [0, log2 n]");
  }
  return tc_hs(make_tensor_planes(ws, x, r), u, v, spec, cfg);
}

std::pair<RankVector, RankVector> mm_rank_vectors(const ContractionSpec& spec) {
  spec.validate();
  std::vector<int> ru;
  for (const AxisLabel& l : spec.u_axes) ru.push_back(l.group == AxisGroup::i ? l.pos : spec.u + l.pos);
  std::vector<int> rv;
  for (const AxisLabel& l : spec.v_axes) rv.push_back(l.group == AxisGroup::k ? l.pos : spec.x + l.pos);
  return {RankVector(std::move(ru)), RankVector(std::move(rv))};
}

template <class T>
Program tc_mm_opt(Workspace& ws, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v,
                  const ContractionSpec& spec, int r, const KernelConfig& cfg, FlattenOrder order) {
  check_contraction(spec, x, u, v);
  check_whole(x);
  const index_t n = x.side();
  const index_t rows = ipow(n, spec.u);
  const index_t inner = ipow(n, spec.x);
  const index_t cols = ipow(n, spec.v);
  if (r < 1 || !is_pow2(r) || r > inner) throw Error(Errc::invalid_planes, "plane count must be a power of two in [1, n^x]");
  const auto [ranks_u, ranks_v] = mm_rank_vectors(spec);

  const Tensor<T> ut = make_tensor<T>(ws, spec.u + spec.x, n, "U'");
  const Tensor<T> vt = make_tensor<T>(ws, spec.x + spec.v, n, "V'");
  const Matrix<T> a = make_matrix<T>(ws, rows, inner, "A");
  const Matrix<T> b = make_matrix<T>(ws, inner, cols, "B");
  const MatrixPlanes<T> c = make_matrix_planes<T>(ws, rows, cols, r, "C");

  std::vector<Task> steps;
  steps.push_back(tt(ut, u, ranks_u, cfg));
  steps.push_back(tt(vt, v, ranks_v, cfg));
  steps.push_back(tf(a, ut, spec.u, spec.x, order, cfg));
  steps.push_back(tf(b, vt, spec.x, spec.v, order, cfg));
  steps.push_back(rmm_opt_rec(c, a, b, cfg));
  steps.push_back(mm_reduce_r(c, cfg));
  steps.push_back(td(x, c.plane(0), spec.u, spec.v, order, cfg));

  Program p;
  p.root = Task::sequence(std::move(steps));
  p.zero_on_entry = {c.plane(0).storage()};
  p.resident_space = ut.size() + vt.size() + a.size() + b.size() + rows * cols * r + x.size();
  return p;
}

#define SPT_INSTANTIATE_TC(T)                                                                                    \
  template Task tc<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const ContractionSpec&,               \
                      const KernelConfig&);                                                                      \
  template Task tc_hs_rec<T>(const TensorPlanes<T>&, const Tensor<T>&, const Tensor<T>&, const ContractionSpec&, \
                             const KernelConfig&);                                                               \
  template Task tc_reduce_r<T>(const TensorPlanes<T>&, const KernelConfig&);                                     \
  template Program tc_program<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const ContractionSpec&,   \
                                 const KernelConfig&);                                                           \
  template Program tc_hs<T>(const TensorPlanes<T>&, const Tensor<T>&, const Tensor<T>&, const ContractionSpec&,  \
                            const KernelConfig&);                                                                \
  template Program tc_hs<T>(Workspace&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,                    \
                            const ContractionSpec&, int, const KernelConfig&);                                   \
  template Program tc_mm_opt<T>(Workspace&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,                \
                                const ContractionSpec&, int, const KernelConfig&, FlattenOrder);

SPT_INSTANTIATE_TC(ModP)
SPT_INSTANTIATE_TC(double)

}  // namespace spt
