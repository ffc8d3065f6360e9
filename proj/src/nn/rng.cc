// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/rng.h"

#include <cmath>
#include <numbers>

namespace bcddi::nn {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  double u1 = Uniform();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::Below(std::uint64_t n) {
  // Largest multiple of n that fits; draws above it are rejected.
  std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  for (;;) {
    std::uint64_t v = engine_();
    if (v <= limit) return v % n;
  }
}

std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bcddi::nn
