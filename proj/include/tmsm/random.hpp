#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tmsm {

/// Stream derivation: a 64-bit master seed is combined with a replicate index
/// and a purpose tag through SplitMix64 to seed an independent mt19937_64.
/// Adding replicates or purposes never perturbs existing streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t purpose_tag(std::string_view purpose) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, std::string_view purpose) {
  return splitmix64(splitmix64(splitmix64(seed) ^ replicate) ^ purpose_tag(purpose));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t replicate, std::string_view purpose)
      : engine_(derive_seed(seed, replicate, purpose)) {}

  /// Uniform on [0, 1) with 53 random bits; identical across platforms.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tmsm
