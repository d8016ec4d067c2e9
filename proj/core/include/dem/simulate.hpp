#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dem/ode.hpp"
#include "dem/process.hpp"
#include "dem/process_spec.hpp"

namespace dem {

/// Per-step hypothesis markers.
enum StepFlag : std::uint8_t {
  kFlagBoundedness = 1 << 0,  // |dY_k| > beta
  kFlagTrend = 1 << 1,        // |E(dY_k | F_i) - F_k(i/n, Y/n)| > delta
  kFlagAverageStep = 1 << 2,  // E(|dY_k| | F_i) > b
  kFlagExceedance = 1 << 3,   // Pr(|dY_k| > beta | F_i) > gamma
  kFlagHardBound = 1 << 4,    // |dY_k| > B
};

/// Slack added to every hypothesis comparison to absorb rounding.
inline constexpr double kHypothesisTolerance = 1e-12;

struct FlagTotals {
  std::int64_t boundedness = 0;
  std::int64_t trend = 0;
  std::int64_t average_step = 0;
  std::int64_t exceedance = 0;
  std::int64_t hard_bound = 0;

  void add(std::uint8_t flags);
  friend bool operator==(const FlagTotals&, const FlagTotals&) = default;
};

/// F_i-measurable event checked before step i; the first failure defines I.
using EventPredicate = std::function<bool(std::int64_t i, std::span<const std::int64_t> y)>;

/// Recorded path Y(0..I_D) of one run.
///
/// Full paths have stride 1. Thinned paths keep every stride-th step plus
/// the stopping step; flag totals and the online sup deviation always
/// cover every step.
class Trajectory {
 public:
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  std::int64_t stop_index = 0;               // I_D
  std::optional<std::int64_t> event_index;   // I, first step whose event fails
  std::optional<std::int64_t> invalid_at;    // step at which the plugin failed
  std::int64_t stride = 1;

  std::vector<std::int64_t> indices;  // recorded step numbers, ascending
  std::vector<std::int64_t> counts;   // indices.size() x a
  std::vector<double> drifts;         // one row per recorded index < stop_index
  std::vector<std::uint8_t> flags;    // one entry per recorded index < stop_index
  FlagTotals flag_totals;             // over all steps i < stop_index

  /// max |Y_k(i) - y_k(i/n) n| over i <= min(floor(sigma n), I_D, I), when a
  /// reference solution was supplied.
  std::optional<double> sup_deviation;

  bool full() const { return stride == 1; }
  std::size_t rows() const { return indices.size(); }
  std::span<const std::int64_t> state(std::size_t row) const {
    return {counts.data() + row * dimension, dimension};
  }
  std::span<const double> drift(std::size_t row) const {
    return {drifts.data() + row * dimension, dimension};
  }
  /// Y(i) for a full path.
  std::span<const std::int64_t> at_step(std::int64_t i) const;
};

struct SimulationOptions {
  bool keep_full_path = false;
  const OdeSolution* reference = nullptr;
  EventPredicate event;
};

/// Runs the process from its initial state until I_D = min(floor(Tn), first
/// exit from D), recording drifts and hypothesis flags.
Trajectory simulate(const ProcessPlugin& plugin, const ProcessSpec& spec, std::uint64_t seed,
                    const SimulationOptions& options = {});

/// Martingale part M_k(j) = sum_{i<j} [dY_k(i) - E(dY_k(i) | F_i)], j <= I_D.
class MartingalePart {
 public:
  MartingalePart(std::size_t a, std::vector<double> values);
  std::size_t dimension() const { return a_; }
  std::int64_t length() const { return static_cast<std::int64_t>(values_.size() / a_); }
  double at(std::size_t k, std::int64_t j) const {
    return values_[static_cast<std::size_t>(j) * a_ + k];
  }
  /// max_{j} |M_k(j)|.
  double max_abs(std::size_t k) const;
  /// max_{j,k} |M_k(j)|.
  double max_abs() const;

 private:
  std::size_t a_;
  std::vector<double> values_;
};

/// Requires a full path.
MartingalePart doob_decompose(const Trajectory& traj);

enum class CheckMode {
  kStrict,          // every step i < I_D
  kProofStructure,  // only steps with i < floor(Tn) inside the deviation envelope
};

/// Which boundedness hypothesis applies.
enum class BoundRule {
  kWorstCase,  // |dY_k| <= beta
  kTruncated,  // |dY_k| <= B; exceedance checked from the recorded flags
};

struct HypothesisSummary {
  std::int64_t checked_steps = 0;
  std::int64_t exempt_steps = 0;
  std::int64_t boundedness_violations = 0;
  std::int64_t trend_violations = 0;
  std::int64_t average_step_violations = 0;
  std::int64_t exceedance_violations = 0;
  std::optional<std::int64_t> first_violation;

  std::int64_t total() const {
    return boundedness_violations + trend_violations + average_step_violations +
           exceedance_violations;
  }
  friend bool operator==(const HypothesisSummary&, const HypothesisSummary&) = default;
};

struct HypothesisOptions {
  CheckMode mode = CheckMode::kStrict;
  BoundRule rule = BoundRule::kWorstCase;
  bool average_step = false;  // also count recorded E|dY| > b flags
};

/// Re-checks the trend and boundedness hypotheses on a full path. Steps at
/// or after the event index I are skipped. In proof-structure mode `sol` is
/// required and steps beyond sigma n (where y is undefined) are exempt.
HypothesisSummary check_hypotheses(const Trajectory& traj, const ProcessSpec& spec,
                                   const HypothesisOptions& options,
                                   const OdeSolution* sol = nullptr);

inline HypothesisSummary check_hypotheses(const Trajectory& traj, const ProcessSpec& spec,
                                          CheckMode mode, const OdeSolution* sol = nullptr) {
  return check_hypotheses(traj, spec, HypothesisOptions{mode}, sol);
}

struct Ensemble {
  ProcessSpec spec;
  std::uint64_t base_seed = 0;
  std::vector<Trajectory> trajectories;
};

struct EnsembleOptions {
  SimulationOptions simulation;
  unsigned jobs = 1;
};

/// count independent runs with seeds derive_seed(base_seed, index); output
/// does not depend on jobs.
Ensemble run_ensemble(const ProcessPlugin& plugin, const ProcessSpec& spec, std::size_t count,
                      std::uint64_t base_seed, const EnsembleOptions& options = {});

/// Runs f(index) for index in [0, count) on `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& f);

}  // namespace dem
