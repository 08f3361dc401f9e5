#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace iaqsim {

/// PCG32 (pcg_xsh_rr_64_32). Pinned generator: golden-log reproducibility
/// depends on this exact algorithm, so it must never be swapped silently.
class Pcg32 {
 public:
  Pcg32(std::uint64_t initstate, std::uint64_t initseq) {
    state_ = 0u;
    inc_ = (initseq << 1u) | 1u;
    next_u32();
    state_ += initstate;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() {
    std::uint64_t hi = next_u32() >> 5;   // 27 bits
    std::uint64_t lo = next_u32() >> 6;   // 26 bits
    return double((hi << 26) | lo) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller. No cached spare: every draw consumes
  /// exactly two uniforms, which keeps stream consumption easy to reason about.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // shift u1 into (0,1] so log() is safe
    u1 = 1.0 - u1;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= v & 0xff;
    h *= kFnvPrime;
    v >>= 8;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent, label-addressable stream from a master seed.
/// Distinct (purpose, entity) pairs map to distinct PCG32 (state, sequence)
/// pairs; the mapping is stable across runs and platforms.
inline Pcg32 seed_stream(std::uint64_t master_seed, std::string_view purpose,
                         std::string_view entity) {
  std::uint64_t h = detail::kFnvOffset;
  h = detail::fnv1a_u64(h, master_seed);
  h = detail::fnv1a(h, purpose);
  h = detail::fnv1a(h, "\x1f");
  h = detail::fnv1a(h, entity);
  std::uint64_t s1 = detail::splitmix64(h);
  std::uint64_t s2 = detail::splitmix64(h + 0x9e3779b97f4a7c15ULL);
  return Pcg32(s1, s2);
}

/// Derived seed for replica k of a sweep (each replica gets its own master seed).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(master_seed) ^ index);
}

}  // namespace iaqsim
