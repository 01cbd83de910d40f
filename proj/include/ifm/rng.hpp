// rng.hpp - deterministic seed derivation for parallel ensembles.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ifm {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for a position in the ensemble (grid indices, realization index).
/// Depends only on its arguments, so the schedule of parallel work cannot
/// change which stream a realization sees.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace ifm
