#pragma once

#include <cstdint>
#include <random>

namespace bo {

enum class Stream : std::uint64_t { Z = 1, Y = 2, Flips = 3, Test = 4, Aux = 5 };

// SplitMix64 finaliser; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t trial, Stream role,
                                   std::uint64_t sub = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  return mix64(h ^ sub);
}

// A generator is a pure function of (seed, trial, role, sub): scheduling and
// thread count never change what a trial sees.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t trial, Stream role,
                                   std::uint64_t sub = 0) {
  return std::mt19937_64(stream_key(seed, trial, role, sub));
}

}  // namespace bo
