#pragma once

#include <string>

#include "spt/scalar.hpp"
#include "spt/storage.hpp"
#include "spt/tensor.hpp"

namespace spt {

/// Binary tensor file: u8 order, u64 side, u8 scalar kind (0 int, 1 f64),
/// then side^order row-major values (u32 or IEEE-754 binary64), all
/// little-endian.
struct TensorFileHeader {
  int order = 0;
  index_t side = 1;
  ScalarKind kind = ScalarKind::modp;
};

TensorFileHeader read_tensor_header(const std::string& path);

template <class T>
void save_tensor(const std::string& path, const Tensor<T>& t);

/// Throws Error(io) on malformed files and Error(shape_mismatch) when the
/// stored scalar kind differs from T.
template <class T>
Tensor<T> load_tensor(Workspace& ws, const std::string& path, std::string name = "T");

}  // namespace spt
