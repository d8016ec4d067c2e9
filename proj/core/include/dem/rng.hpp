#pragma once

#include <cstdint>
#include <random>

#include "dem/process.hpp"

namespace dem {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the stream for trajectory `index` under `base_seed`. Depends
/// only on the pair, so ensembles are independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// ChoiceSource backed by a 64-bit Mersenne Twister.
class RngSource final : public ChoiceSource {
 public:
  explicit RngSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t uniform(std::uint64_t k) override;
  std::uint64_t bits() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dem
