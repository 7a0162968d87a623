#include "spt/contraction.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "spt/error.hpp"
#include "spt/scalar.hpp"

namespace spt {

std::string to_string(const AxisLabel& label) {
  const char g = label.group == AxisGroup::i ? 'i' : label.group == AxisGroup::j ? 'j' : 'k';
  return std::string(1, g) + std::to_string(label.pos);
}

ContractionSpec ContractionSpec::canonical(int u, int v, int x) {
  ContractionSpec s;
  s.u = u;
  s.v = v;
  s.x = x;
  for (int p = 1; p <= u; ++p) s.u_axes.push_back({AxisGroup::i, p});
  for (int p = 1; p <= x; ++p) s.u_axes.push_back({AxisGroup::k, p});
  for (int p = 1; p <= v; ++p) s.v_axes.push_back({AxisGroup::j, p});
  for (int p = 1; p <= x; ++p) s.v_axes.push_back({AxisGroup::k, p});
  return s;
}

namespace {

std::vector<AxisLabel> parse_labels(const std::string& text) {
  std::vector<AxisLabel> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.size() < 2 || (item[0] != 'i' && item[0] != 'j' && item[0] != 'k')) {
      throw Error(Errc::invalid_argument, "bad axis label '" + item + "'");
    }
    AxisLabel l;
    l.group = item[0] == 'i' ? AxisGroup::i : item[0] == 'j' ? AxisGroup::j : AxisGroup::k;
    try {
      std::size_t used = 0;
      l.pos = std::stoi(item.substr(1), &used);
      if (used != item.size() - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "bad axis label '" + item + "'");
    }
    out.push_back(l);
  }
  return out;
}

int count_group(const std::vector<AxisLabel>& axes, AxisGroup g) {
  return static_cast<int>(std::count_if(axes.begin(), axes.end(), [g](const AxisLabel& l) { return l.group == g; }));
}

}  // namespace

ContractionSpec ContractionSpec::parse(const std::string& u_labels, const std::string& v_labels) {
  ContractionSpec s;
  s.u_axes = parse_labels(u_labels);
  s.v_axes = parse_labels(v_labels);
  s.u = count_group(s.u_axes, AxisGroup::i);
  s.v = count_group(s.v_axes, AxisGroup::j);
  s.x = count_group(s.u_axes, AxisGroup::k);
  s.validate();
  return s;
}

void ContractionSpec::validate() const {
  if (x < 1) throw Error(Errc::unsupported, "contraction without contracted axes (outer product) is not supported");
  if (u < 1 || v < 1) throw Error(Errc::unsupported, "each operand needs at least one uncontracted axis");
  if (u + x > kMaxOrder || v + x > kMaxOrder || u + v > kMaxOrder) {
    throw Error(Errc::invalid_argument, "tensor order exceeds the supported maximum");
  }
  auto check = [](const std::vector<AxisLabel>& axes, AxisGroup own, int own_count, int k_count, const char* who) {
    if (static_cast<int>(axes.size()) != own_count + k_count) {
      throw Error(Errc::invalid_argument, std::string(who) + ": axis count differs from its groups");
    }
    std::vector<bool> seen_own(static_cast<std::size_t>(own_count) + 1, false);
    std::vector<bool> seen_k(static_cast<std::size_t>(k_count) + 1, false);
    for (const AxisLabel& l : axes) {
      const bool is_own = l.group == own;
      if (!is_own && l.group != AxisGroup::k) {
        throw Error(Errc::invalid_argument, std::string(who) + ": axis " + to_string(l) + " belongs to the other operand");
      }
      auto& seen = is_own ? seen_own : seen_k;
      const int limit = is_own ? own_count : k_count;
      if (l.pos < 1 || l.pos > limit || seen[static_cast<std::size_t>(l.pos)]) {
        throw Error(Errc::invalid_argument, std::string(who) + ": axis " + to_string(l) + " is out of range or repeated");
      }
      seen[static_cast<std::size_t>(l.pos)] = true;
    }
  };
  check(u_axes, AxisGroup::i, u, x, "U");
  check(v_axes, AxisGroup::j, v, x, "V");
}

int ContractionSpec::global_axis(const AxisLabel& label) const {
  switch (label.group) {
    case AxisGroup::i: return label.pos - 1;
    case AxisGroup::j: return u + label.pos - 1;
    case AxisGroup::k: return u + v + label.pos - 1;
  }
  return -1;
}

template <class T>
void check_contraction(const ContractionSpec& spec, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v) {
  spec.validate();
  if (x.order() != spec.u + spec.v || u.order() != spec.u + spec.x || v.order() != spec.v + spec.x) {
    throw Error(Errc::shape_mismatch, "tensor orders do not match the contraction");
  }
  if (x.side() != u.side() || x.side() != v.side()) throw Error(Errc::shape_mismatch, "tensors need a common side");
}

template <class T>
GlobalStrides global_strides(const ContractionSpec& spec, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v) {
  GlobalStrides g;
  for (int a = 0; a < spec.u + spec.v; ++a) g.x[static_cast<std::size_t>(a)] = x.stride(a);
  for (int a = 0; a < u.order(); ++a) {
    g.u[static_cast<std::size_t>(spec.global_axis(spec.u_axes[static_cast<std::size_t>(a)]))] = u.stride(a);
  }
  for (int a = 0; a < v.order(); ++a) {
    g.v[static_cast<std::size_t>(spec.global_axis(spec.v_axes[static_cast<std::size_t>(a)]))] = v.stride(a);
  }
  return g;
}

template <class T>
void tc_loop_permuted(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
                      std::span<const int> order) {
  check_contraction(spec, x, u, v);
  const int w = spec.w();
  if (static_cast<int>(order.size()) != w) throw Error(Errc::invalid_argument, "loop order must list every axis");
  std::vector<bool> seen(static_cast<std::size_t>(w), false);
  for (int a : order) {
    if (a < 0 || a >= w || seen[static_cast<std::size_t>(a)]) {
      throw Error(Errc::invalid_argument, "loop order is not a permutation");
    }
    seen[static_cast<std::size_t>(a)] = true;
  }
  const GlobalStrides g = global_strides(spec, x, u, v);
  const index_t n = x.side();
  T* xd = x.storage()->data();
  const T* ud = u.storage()->data();
  const T* vd = v.storage()->data();

  std::vector<index_t> zero_idx(static_cast<std::size_t>(spec.u + spec.v), 0);
  for (index_t e = 0; e < x.size(); ++e) {
    index_t rem = e;
    for (int a = spec.u + spec.v - 1; a >= 0; --a) {
      zero_idx[static_cast<std::size_t>(a)] = rem % n;
      rem /= n;
    }
    x[zero_idx] = T{};
  }

  std::vector<index_t> idx(static_cast<std::size_t>(w), 0);
  const index_t total = ipow(n, w);
  for (index_t e = 0; e < total; ++e) {
    index_t rem = e;
    for (int p = w - 1; p >= 0; --p) {
      idx[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = rem % n;
      rem /= n;
    }
    index_t xi = x.offset();
    index_t ui = u.offset();
    index_t vi = v.offset();
    for (int a = 0; a < w; ++a) {
      const auto as = static_cast<std::size_t>(a);
      xi += idx[as] * g.x[as];
      ui += idx[as] * g.u[as];
      vi += idx[as] * g.v[as];
    }
    xd[xi] += ud[ui] * vd[vi];
  }
}

template <class T>
void tc_loop(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec) {
  std::vector<int> order(static_cast<std::size_t>(spec.w()));
  for (int a = 0; a < spec.w(); ++a) order[static_cast<std::size_t>(a)] = a;
  tc_loop_permuted(x, u, v, spec, order);
}

#define SPT_INSTANTIATE_CONTRACTION(T)                                                                       \
  template void check_contraction<T>(const ContractionSpec&, const Tensor<T>&, const Tensor<T>&,              \
                                     const Tensor<T>&);                                                      \
  template GlobalStrides global_strides<T>(const ContractionSpec&, const Tensor<T>&, const Tensor<T>&,        \
                                           const Tensor<T>&);                                                \
  template void tc_loop<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const ContractionSpec&);     \
  template void tc_loop_permuted<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,                     \
                                    const ContractionSpec&, std::span<const int>);

SPT_INSTANTIATE_CONTRACTION(ModP)
SPT_INSTANTIATE_CONTRACTION(double)

}  // namespace spt
