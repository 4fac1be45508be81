#include "choreo/rng.hpp"

#include "choreo/error.hpp"

namespace choreo {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng endpoint_rng(std::uint64_t seed, std::string_view location_name) {
  return Rng(splitmix64(splitmix64(seed) ^ fnv1a(location_name)));
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kPreconditionFailed, "uniform_below needs a positive bound");
  // Rejection sampling keeps the draw exactly uniform and independent of the
  // standard library's distribution implementation.
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

bool random_bit(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace choreo
