#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace parkour {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  return fnv1a64(&v, sizeof v, h);
}

inline std::uint64_t hash_mix(std::uint64_t h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  return hash_mix(h, bits);
}

inline std::uint64_t hash_mix(std::uint64_t h, int v) {
  return hash_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
}

inline std::uint64_t hash_mix(std::uint64_t h, bool v) {
  return hash_mix(h, static_cast<std::uint64_t>(v ? 1 : 0));
}

inline std::uint64_t hash_mix(std::uint64_t h, std::string_view s) {
  h = hash_mix(h, static_cast<std::uint64_t>(s.size()));
  return fnv1a64(s.data(), s.size(), h);
}

}  // namespace parkour
