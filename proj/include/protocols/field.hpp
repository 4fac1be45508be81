#pragma once

#include <cstdint>
#include <vector>

#include "choreo/rng.hpp"

namespace protocols {

/// Residues modulo the prime 999983. Every function expects and returns
/// values in [0, kFieldPrime).
inline constexpr std::int64_t kFieldPrime = 999983;

using FieldElement = std::int64_t;

inline FieldElement field_reduce(std::int64_t x) {
  x %= kFieldPrime;
  return x < 0 ? x + kFieldPrime : x;
}

inline FieldElement field_add(FieldElement a, FieldElement b) { return (a + b) % kFieldPrime; }

inline FieldElement field_sub(FieldElement a, FieldElement b) { return (a - b + kFieldPrime) % kFieldPrime; }

inline FieldElement field_rand(choreo::Rng& rng) {
  return static_cast<FieldElement>(choreo::uniform_below(rng, kFieldPrime));
}

inline FieldElement field_sum(const std::vector<FieldElement>& xs) {
  FieldElement acc = 0;
  for (auto x : xs) acc = field_add(acc, x);
  return acc;
}

}  // namespace protocols
