#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dvr {

/// Independent generator derived from a master seed and a stream name, so
/// that each pipeline stage draws from its own sequence ("split",
/// "negatives", "synth", ...).
std::mt19937_64 seed_stream(std::uint64_t seed, std::string_view name, std::uint64_t salt = 0);

}  // namespace dvr
