#pragma once

#include <cstdint>
#include <ostream>

namespace spt {

/// Element of the prime field Z/(2^31 - 1). Every kernel in the library is
/// instantiated for this type and for double; the field is used wherever two
/// algorithms that sum in different orders must agree bit for bit.
class ModP {
 public:
  static constexpr std::uint32_t kModulus = 0x7fffffffu;

  constexpr ModP() = default;
  constexpr explicit ModP(std::uint64_t v) : value_(reduce(v)) {}

  constexpr std::uint32_t value() const { return value_; }

  constexpr ModP& operator+=(ModP o) {
    value_ = reduce(std::uint64_t{value_} + o.value_);
    return *this;
  }
  constexpr ModP& operator*=(ModP o) {
    value_ = reduce(std::uint64_t{value_} * o.value_);
    return *this;
  }
  friend constexpr ModP operator+(ModP a, ModP b) { return a += b; }
  friend constexpr ModP operator*(ModP a, ModP b) { return a *= b; }
  friend constexpr bool operator==(ModP a, ModP b) { return a.value_ == b.value_; }

  friend std::ostream& operator<<(std::ostream& os, ModP v) { return os << v.value_; }

 private:
  // Mersenne reduction; valid for any 62-bit input.
  static constexpr std::uint32_t reduce(std::uint64_t v) {
    v = (v & kModulus) + (v >> 31);
    v = (v & kModulus) + (v >> 31);
    return static_cast<std::uint32_t>(v >= kModulus ? v - kModulus : v);
  }

  std::uint32_t value_ = 0;
};

enum class ScalarKind : std::uint8_t { modp = 0, f64 = 1 };

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<ModP> {
  static constexpr ScalarKind kind = ScalarKind::modp;
  static constexpr const char* name = "int";
};

template <>
struct ScalarTraits<double> {
  static constexpr ScalarKind kind = ScalarKind::f64;
  static constexpr const char* name = "f64";
};

}  // namespace spt
