#pragma once

#include <cstdint>
#include <random>

#include "spt/scalar.hpp"
#include "spt/storage.hpp"

namespace spt {

using Rng = std::mt19937_64;

template <class T>
T random_scalar(Rng& rng);

template <>
inline ModP random_scalar<ModP>(Rng& rng) {
  return ModP(rng() % ModP::kModulus);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
template <>
inline double random_scalar<double>(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void fill_random(Storage<T>& s, Rng& rng) {
  T* d = s.data();
  for (index_t i = 0; i < s.size(); ++i) d[i] = random_scalar<T>(rng);
}

}  // namespace spt
