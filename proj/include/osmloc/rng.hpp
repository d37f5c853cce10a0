#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace osmloc {

// splitmix64 finalizer; used to derive independent sub-streams from one
// master seed so that every randomized stage is individually reproducible.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Named sub-stream: 'seed' is the master seed, 'tag' names the consumer
// (e.g. "prior", "embedding", "particles"), 'index' separates parallel lanes.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view tag,
                                    std::uint64_t index = 0) {
  return mix_seed(seed ^ mix_seed(hash_tag(tag)) ^ mix_seed(index * 0x5851f42d4c957f2dULL + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view tag,
                                std::uint64_t index = 0) {
  return std::mt19937_64(substream_seed(seed, tag, index));
}

}  // namespace osmloc
