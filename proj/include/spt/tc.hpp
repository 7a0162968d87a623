#pragma once

#include <utility>

#include "spt/config.hpp"
#include "spt/contraction.hpp"
#include "spt/layout.hpp"
#include "spt/linearize.hpp"
#include "spt/planes.hpp"
#include "spt/task.hpp"
#include "spt/tensor.hpp"

namespace spt {

/// In-place recursive contraction: X += contraction. 2^x sequential steps,
/// each a parallel loop over the 2^(u+v) output orthants.
template <class T>
Task tc(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
        const KernelConfig& cfg = {});

/// Hybrid static recursion over the active instance range.
template <class T>
Task tc_hs_rec(const TensorPlanes<T>& planes, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
               const KernelConfig& cfg = {});

/// instance 0 <- elementwise sum of all instances.
template <class T>
Task tc_reduce_r(const TensorPlanes<T>& planes, const KernelConfig& cfg = {});

/// True when r is (2^x)^i with r <= n^x.
bool valid_instance_count(index_t n, int x, std::int64_t r);

/// Drivers computing X = contraction; X must be a whole dense buffer.
template <class T>
Program tc_program(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
                   const KernelConfig& cfg = {});

template <class T>
Program tc_hs(const TensorPlanes<T>& planes, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
              const KernelConfig& cfg = {});

template <class T>
Program tc_hs(Workspace& ws, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec,
              int r, const KernelConfig& cfg = {});

/// Rank vectors taking U to (i.., k..) and V to (k.., j..).
std::pair<RankVector, RankVector> mm_rank_vectors(const ContractionSpec& spec);

/// Transpose, flatten, multiply through r planes, deflatten.
template <class T>
Program tc_mm_opt(Workspace& ws, const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v,
                  const ContractionSpec& spec, int r, const KernelConfig& cfg = {},
                  FlattenOrder order = FlattenOrder::morton);

}  // namespace spt
