#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace netdac {

using Rng = std::mt19937_64;

/// Child seed for a named sub-stream: splitmix64(seed ^ fnv1a64(label)).
/// Depends only on (seed, label), never on the order streams are created.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

inline Rng make_stream(std::uint64_t seed, std::string_view label) {
  return Rng(derive_seed(seed, label));
}

}  // namespace netdac
