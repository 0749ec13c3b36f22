// FNV-1a hashing for model/corpus fingerprints used in staleness checks.
#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace arix {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  return fnv1a(std::string_view(buf, 8), h);
}

inline std::uint64_t fnv1a_double(double v, std::uint64_t h) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  return fnv1a(std::string_view(buf, 8), h);
}

}  // namespace arix
