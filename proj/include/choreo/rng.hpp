#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace choreo {

using Rng = std::mt19937_64;

/// Independent per-location stream: the same (seed, name) always yields the
/// same sequence, whichever interpreter runs the location's code.
Rng endpoint_rng(std::uint64_t seed, std::string_view location_name);

/// Uniform draw from [0, bound). `bound` must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

bool random_bit(Rng& rng);

}  // namespace choreo
