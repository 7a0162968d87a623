#include "spt/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "spt/error.hpp"

namespace spt {

namespace {

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& is, int bytes, const std::string& path) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int ch = is.get();
    if (ch == std::char_traits<char>::eof()) throw Error(Errc::io, path + ": truncated tensor file");
    v |= static_cast<std::uint64_t>(ch & 0xff) << (8 * i);
  }
  return v;
}

TensorFileHeader read_header(std::istream& is, const std::string& path) {
  TensorFileHeader h;
  h.order = static_cast<int>(get_le(is, 1, path));
  h.side = static_cast<index_t>(get_le(is, 8, path));
  const auto kind = get_le(is, 1, path);
  if (h.order > kMaxOrder) throw Error(Errc::io, path + ": tensor order out of range");
  if (!is_pow2(h.side)) throw Error(Errc::io, path + ": tensor side must be a power of two");
  if (kind > 1) throw Error(Errc::io, path + ": unknown scalar kind");
  if (h.order > 0 && log2_floor(static_cast<std::uint64_t>(h.side)) * h.order > 40) {
    throw Error(Errc::io, path + ": tensor too large");
  }
  h.kind = static_cast<ScalarKind>(kind);
  return h;
}

}  // namespace

TensorFileHeader read_tensor_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  return read_header(is, path);
}

template <class T>
void save_tensor(const std::string& path, const Tensor<T>& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  put_le(os, static_cast<std::uint64_t>(t.order()), 1);
  put_le(os, static_cast<std::uint64_t>(t.side()), 8);
  put_le(os, static_cast<std::uint64_t>(ScalarTraits<T>::kind), 1);
  std::vector<index_t> idx(static_cast<std::size_t>(t.order()), 0);
  for (index_t e = 0; e < t.size(); ++e) {
    index_t rem = e;
    for (int a = t.order() - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = rem % t.side();
      rem /= t.side();
    }
    const T& v = t[idx];
    if constexpr (std::is_same_v<T, ModP>) {
      put_le(os, v.value(), 4);
    } else {
      put_le(os, std::bit_cast<std::uint64_t>(v), 8);
    }
  }
  if (!os) throw Error(Errc::io, "write failed for " + path);
}

template <class T>
Tensor<T> load_tensor(Workspace& ws, const std::string& path, std::string name) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  const TensorFileHeader h = read_header(is, path);
  if (h.kind != ScalarTraits<T>::kind) throw Error(Errc::shape_mismatch, path + ": scalar kind differs");
  Tensor<T> t = make_tensor<T>(ws, h.order, h.side, std::move(name));
  T* d = t.storage()->data();
  for (index_t e = 0; e < t.size(); ++e) {
    if constexpr (std::is_same_v<T, ModP>) {
      const auto raw = get_le(is, 4, path);
      if (raw >= ModP::kModulus) throw Error(Errc::io, path + ": integer value out of range");
      d[e] = ModP(raw);
    } else {
      d[e] = std::bit_cast<double>(get_le(is, 8, path));
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) throw Error(Errc::io, path + ": trailing bytes");
  return t;
}

template void save_tensor<ModP>(const std::string&, const Tensor<ModP>&);
template void save_tensor<double>(const std::string&, const Tensor<double>&);
template Tensor<ModP> load_tensor<ModP>(Workspace&, const std::string&, std::string);
template Tensor<double> load_tensor<double>(Workspace&, const std::string&, std::string);

}  // namespace spt
