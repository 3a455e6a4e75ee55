#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace censbo {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-derived stream seed: a stable function of a root seed and a tag path,
/// e.g. derive_seed(root, {tree_index, iteration}).
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(root);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags so that independent consumers of one root seed never collide.
namespace stream {
inline constexpr std::uint64_t kBootstrap = 0xB007;
inline constexpr std::uint64_t kTree = 0x7EE;
inline constexpr std::uint64_t kAcquisition = 0xACE;
inline constexpr std::uint64_t kDesign = 0xDE5;
inline constexpr std::uint64_t kNoise = 0x4015E;
inline constexpr std::uint64_t kScenario = 0x5CE;
inline constexpr std::uint64_t kRandomFill = 0xF111;
}  // namespace stream

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace censbo
