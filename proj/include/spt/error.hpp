#pragma once

#include <stdexcept>
#include <string>

namespace spt {

enum class Errc {
  invalid_argument,
  shape_mismatch,
  degenerate_split,
  invalid_planes,
  unsupported,
  io,
  config,
  race,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::shape_mismatch: return "shape mismatch";
    case Errc::degenerate_split: return "degenerate split";
    case Errc::invalid_planes: return "invalid plane count";
    case Errc::unsupported: return "unsupported";
    case Errc::io: return "i/o error";
    case Errc::config: return "invalid configuration";
    case Errc::race: return "race detected";
  }
  return "unknown";
}

}  // namespace spt
