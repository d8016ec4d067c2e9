#include "dem/rng.hpp"

#include "dem/error.hpp"

namespace dem {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  return mix64(mix64(base_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t RngSource::uniform(std::uint64_t k) {
  if (k == 0) throw InstanceError("uniform(0) has an empty range");
  if (k == 1) return 0;
  // Rejection on the top partial block keeps the draw exactly uniform and
  // independent of the standard library's distribution implementation.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % k;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % k;
}

}  // namespace dem
