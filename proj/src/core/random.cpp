#include "dvr/random.hpp"

namespace dvr {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::mt19937_64 seed_stream(std::uint64_t seed, std::string_view name, std::uint64_t salt) {
  const std::uint64_t tag = fnv1a(name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace dvr
