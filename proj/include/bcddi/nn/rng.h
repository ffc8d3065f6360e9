// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_RNG_H_
#define BCDDI_NN_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace bcddi::nn {

// Seeded generator whose output is fixed by the C++ standard, so runs
// reproduce bit-for-bit across toolchains.
//
//   raw bits : std::mt19937_64 (sequence mandated by [rand.eng.mers])
//   Uniform(): top 53 bits of one draw scaled by 2^-53, in [0, 1)
//   Normal() : Box-Muller on two Uniform() draws,
//              sqrt(-2 ln(1 - u1)) * cos(2 pi u2); the sine branch is
//              discarded so every Normal() consumes exactly two draws.
//
// std::uniform_real_distribution and std::normal_distribution are avoided
// because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  double Uniform();
  double Normal();
  // Uniform integer in [0, n) by rejection sampling.
  std::uint64_t Below(std::uint64_t n);

  template <typename It>
  void Shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = Below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a; used to derive per-name sub-seeds.
std::uint64_t Fnv1a64(std::string_view text);

// Fixed offsets added to the run seed for each consumer of randomness.
namespace seed_offset {
inline constexpr std::uint64_t kInit = 0;
inline constexpr std::uint64_t kShuffle = 1;
inline constexpr std::uint64_t kDropout = 2;
inline constexpr std::uint64_t kDevSplit = 3;
inline constexpr std::uint64_t kVaeNoise = 4;
}  // namespace seed_offset

}  // namespace bcddi::nn

#endif  // BCDDI_NN_RNG_H_
