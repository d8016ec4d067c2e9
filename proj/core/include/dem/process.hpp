#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace dem {

/// Source of the random choices a process step consumes. Steps draw only
/// through this interface, which lets test oracles enumerate every outcome.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  /// Uniform integer in [0, k); k >= 1.
  virtual std::uint64_t uniform(std::uint64_t k) = 0;
};

/// One running instance of a discrete-time process.
class Process {
 public:
  virtual ~Process() = default;

  /// Current observables Y_1(i), ..., Y_a(i).
  virtual std::span<const std::int64_t> observe() const = 0;

  /// Exact conditional expectation E(Y_k(i+1) - Y_k(i) | F_i).
  virtual void drift(std::span<double> out) const = 0;

  /// Exact E(|Y_k(i+1) - Y_k(i)| | F_i). Returns false if not provided.
  virtual bool mean_abs_step(std::span<double> out) const {
    (void)out;
    return false;
  }

  /// Exact Pr(|Y_k(i+1) - Y_k(i)| > beta | F_i). Returns false if not provided.
  virtual bool exceedance_probability(double beta, std::span<double> out) const {
    (void)beta;
    (void)out;
    return false;
  }

  /// Advance one step. Must draw randomness only from `choices` and must
  /// not loop on rejection, so that the outcome tree is finite.
  virtual void step(ChoiceSource& choices) = 0;

  virtual std::unique_ptr<Process> clone() const = 0;

  /// Identifies the full internal state (used for reachable-state enumeration).
  virtual std::string key() const = 0;
};

/// Factory for process instances of a given scale n.
class ProcessPlugin {
 public:
  virtual ~ProcessPlugin() = default;
  virtual std::string_view name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::unique_ptr<Process> start(std::int64_t n) const = 0;
};

}  // namespace dem
