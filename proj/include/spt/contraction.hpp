#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spt/config.hpp"
#include "spt/tensor.hpp"

namespace spt {

enum class AxisGroup : std::uint8_t { i, j, k };

/// One tensor axis named by its index group and 1-based position in it,
/// e.g. {k, 2} is k_2.
struct AxisLabel {
  AxisGroup group = AxisGroup::i;
  int pos = 1;

  friend bool operator==(const AxisLabel&, const AxisLabel&) = default;
};

std::string to_string(const AxisLabel& label);

/// X(i_1..i_u, j_1..j_v) = sum over k_1..k_x of U{i, k} * V{j, k}, where
/// U and V may hold their axes in any order. Global loop axes are numbered
/// i_1..i_u, j_1..j_v, k_1..k_x.
struct ContractionSpec {
  int u = 1;
  int v = 1;
  int x = 1;
  std::vector<AxisLabel> u_axes;
  std::vector<AxisLabel> v_axes;

  /// U(i.., k..), V(j.., k..).
  static ContractionSpec canonical(int u, int v, int x);
  /// Comma separated labels such as "i1,k1,i2,k2" and "j1,j2,k2,k1".
  static ContractionSpec parse(const std::string& u_labels, const std::string& v_labels);

  /// Throws unsupported when any group is empty, invalid_argument when the
  /// labels are not a consistent assignment.
  void validate() const;

  int w() const { return u + v + x; }
  int global_axis(const AxisLabel& label) const;
};

/// Per-global-axis element strides of the three operands (0 where a
/// tensor does not carry that axis).
inline constexpr int kMaxLoopAxes = 2 * kMaxOrder;
using LoopStrides = std::array<index_t, kMaxLoopAxes>;

struct GlobalStrides {
  LoopStrides x{}, u{}, v{};
};

template <class T>
GlobalStrides global_strides(const ContractionSpec& spec, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v);

/// Shape checks shared by every contraction kernel.
template <class T>
void check_contraction(const ContractionSpec& spec, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v);

/// Standalone oracle: zeroes X, then accumulates with the natural loop order.
template <class T>
void tc_loop(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec);

/// As tc_loop with the w loops nested in `order` (global axes, outermost first).
template <class T>
void tc_loop_permuted(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
                      std::span<const int> order);

}  // namespace spt
