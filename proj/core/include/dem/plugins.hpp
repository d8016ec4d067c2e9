#pragma once

#include <cstdint>
#include <memory>

#include "dem/process.hpp"
#include "dem/process_spec.hpp"
#include "dem/registry.hpp"

namespace dem {

/// Occupancy of n bins under uniform ball throws. Y(i) = number of empty
/// bins after i balls; E(dY | F_i) = -Y(i)/n.
class BallsInBins final : public ProcessPlugin {
 public:
  std::string_view name() const override { return "balls-in-bins"; }
  std::size_t dimension() const override { return 1; }
  std::unique_ptr<Process> start(std::int64_t n) const override;
};

/// Random multigraph grown by one uniformly random ordered pair of distinct
/// vertices per step. Y_k(i) = number of vertices of degree k, k = 0..K.
/// E(dY_k | F_i) = 2(Y_{k-1} - Y_k)/n exactly (Y_{-1} = 0).
class DegreeProcess final : public ProcessPlugin {
 public:
  explicit DegreeProcess(int max_degree);
  std::string_view name() const override { return "degree-process"; }
  std::size_t dimension() const override { return static_cast<std::size_t>(max_degree_) + 1; }
  std::unique_ptr<Process> start(std::int64_t n) const override;
  int max_degree() const { return max_degree_; }

 private:
  int max_degree_;
};

/// Random greedy matching on the complete graph K_n: each step matches a
/// uniformly random pair of unmatched vertices. Y(i) = unmatched vertices.
class GreedyMatching final : public ProcessPlugin {
 public:
  std::string_view name() const override { return "greedy-matching"; }
  std::size_t dimension() const override { return 1; }
  std::unique_ptr<Process> start(std::int64_t n) const override;
};

/// a coordinates frozen at round(fraction * n).
class ConstantProcess final : public ProcessPlugin {
 public:
  ConstantProcess(std::size_t dimension, double fraction);
  std::string_view name() const override { return "constant"; }
  std::size_t dimension() const override { return dimension_; }
  std::unique_ptr<Process> start(std::int64_t n) const override;

 private:
  std::size_t dimension_;
  double fraction_;
};

/// Simple symmetric walk started at round(fraction * n): dY = +-1.
class FairCoin final : public ProcessPlugin {
 public:
  explicit FairCoin(double fraction);
  std::string_view name() const override { return "fair-coin"; }
  std::size_t dimension() const override { return 1; }
  std::unique_ptr<Process> start(std::int64_t n) const override;

 private:
  double fraction_;
};

/// Adds the built-in drifts (balls-in-bins, degree-process, greedy-matching,
/// zero, linear) and processes (balls-in-bins, degree-process,
/// greedy-matching, constant, fair-coin) to `registry`.
void register_builtins(Registry& registry);

/// Process-wide registry holding exactly the built-ins.
const Registry& builtin_registry();

/// Process plugin for a spec: the explicit "process" reference if present,
/// otherwise the process registered under the drift's plugin name.
std::shared_ptr<const ProcessPlugin> resolve_process(const ProcessSpec& spec,
                                                     const Registry& registry = builtin_registry());

}  // namespace dem
