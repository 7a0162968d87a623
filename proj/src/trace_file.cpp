#include <array>
#include <fstream>

#include "spt/cache_sim.hpp"
#include "spt/error.hpp"

namespace spt {

namespace {

constexpr std::size_t kRecord = 13;

template <class U>
void put_le(unsigned char* out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
}

template <class U>
U get_le(const unsigned char* in) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in[i]) << (8 * i);
  return v;
}

}  // namespace

void write_trace_file(const std::string& path, std::span<const Access> trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open trace file for writing: " + path);
  std::array<unsigned char, kRecord> rec{};
  for (const Access& a : trace) {
    put_le<std::uint32_t>(rec.data(), a.buffer);
    put_le<std::uint64_t>(rec.data() + 4, a.index);
    rec[12] = a.write ? 1 : 0;
    out.write(reinterpret_cast<const char*>(rec.data()), kRecord);
  }
  if (!out) throw Error(Errc::io, "failed writing trace file: " + path);
}

std::vector<Access> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open trace file: " + path);
  std::vector<Access> trace;
  std::array<unsigned char, kRecord> rec{};
  while (in.read(reinterpret_cast<char*>(rec.data()), kRecord)) {
    if (rec[12] > 1) throw Error(Errc::io, "corrupt trace record flag in " + path);
    trace.push_back(Access{get_le<std::uint32_t>(rec.data()), get_le<std::uint64_t>(rec.data() + 4), rec[12] == 1});
  }
  if (in.gcount() != 0) throw Error(Errc::io, "truncated trace record in " + path);
  return trace;
}

}  // namespace spt
