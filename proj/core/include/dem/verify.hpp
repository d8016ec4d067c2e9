#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dem/ode.hpp"
#include "dem/process.hpp"
#include "dem/process_spec.hpp"
#include "dem/simulate.hpp"

namespace dem {

enum class ExtensionMode {
  kPlain,       // worst-case step bound beta
  kSideEvents,  // hypotheses only under additional events E_i
  kAveraged,    // extra average bound E|dY_k| <= b
  kTruncated,   // Pr(|dY_k| > beta) <= gamma and |dY_k| <= B
};

std::string_view to_string(ExtensionMode mode);
/// Accepts "plain", "side-events", "averaged", "truncated"; throws SchemaError.
ExtensionMode parse_extension_mode(std::string_view name);

enum class ReportStatus { kPass, kFail, kHypothesesFailed, kVacuous };
std::string_view to_string(ReportStatus status);

struct VerifyOptions {
  ExtensionMode mode = ExtensionMode::kPlain;
  CheckMode check = CheckMode::kStrict;
  unsigned jobs = 1;
  /// Event predicate for side-events mode; defaults to ProcessSpec::side_events().
  EventPredicate event{};
};

/// Numeric replay of the deterministic part of the proof on one path.
struct GronwallReplay {
  bool applicable = false;  // the martingale event held, so the chain must hold
  bool recurrence_holds = true;
  bool final_bound_holds = true;
  std::optional<std::int64_t> first_failure;

  bool holds() const { return recurrence_holds && final_bound_holds; }
  friend bool operator==(const GronwallReplay&, const GronwallReplay&) = default;
};

struct ReplayConstants {
  double R = 1.0;
  double initial_slack = 0.0;  // extra x B added to 2 lambda n
  double delta = 0.0;          // delta, or delta + gamma B when truncating
};

/// With D(j) = max_k |Y_k(j) - y_k(j/n) n| checks, for every j <= limit,
///   D(j) < 2 lambda n + sum_{i<j} [L/n D(i) + (L R/n + delta)]
/// and
///   D(j) < (2 lambda n + R + delta min{Tn, n/L}) e^{Lj/n} <= 3 lambda n e^{LT}.
GronwallReplay replay_gronwall(const Trajectory& traj, const OdeSolution& sol,
                               const ProcessSpec& spec, const ReplayConstants& constants,
                               std::int64_t limit);

struct TrajectoryOutcome {
  std::uint64_t seed = 0;
  std::int64_t stop_index = 0;
  std::optional<std::int64_t> event_index;
  std::int64_t checked_until = 0;  // min(floor(sigma n), I_D, I)
  double sup_deviation = 0.0;
  bool envelope_violated = false;  // sup_deviation >= envelope
  double max_martingale = 0.0;
  bool martingale_event = false;   // max_{j,k} |M_k(j)| < lambda n
  HypothesisSummary hypotheses;
  GronwallReplay replay;

  friend bool operator==(const TrajectoryOutcome&, const TrajectoryOutcome&) = default;
};

struct VerificationReport {
  ExtensionMode mode = ExtensionMode::kPlain;
  CheckMode check = CheckMode::kStrict;
  std::int64_t n = 0;
  std::size_t a = 0;
  double lipschitz = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  std::vector<double> anchor;
  Extensions extensions;

  Constants constants;
  DriftBound drift_bound;
  Admissibility admissibility;

  double theoretical_envelope = 0.0;  // 3 e^{LT} lambda n
  double failure_probability = 0.0;   // as computed; may exceed 1
  std::optional<double> failure_probability_two_term;  // averaged mode only

  std::uint64_t seed = 0;
  std::vector<TrajectoryOutcome> trajectories;
  std::size_t failure_count = 0;
  std::size_t martingale_failure_count = 0;
  std::int64_t hypothesis_violations = 0;
  std::size_t replay_checked = 0;
  std::size_t replay_failures = 0;

  double sampling_slack = 0.0;  // 3 sqrt(p (1-p) / count)
  bool within_bound = false;    // failure fraction <= min(1, p) + slack
  bool vacuous = false;         // sigma = 0
  ReportStatus status = ReportStatus::kPass;
  std::vector<std::string> notes;

  std::size_t count() const { return trajectories.size(); }
  double failure_probability_display() const {
    return failure_probability < 1.0 ? failure_probability : 1.0;
  }
  bool passed() const { return status == ReportStatus::kPass || status == ReportStatus::kVacuous; }
};

/// Failure probability bound for a mode (reads b, gamma, x from the extensions).
double mode_failure_probability(const ProcessSpec& spec, double T, ExtensionMode mode);

/// Empirical check of the dynamic-concentration guarantee. Throws
/// InadmissibleLambda if lambda fails the admissibility inequality and
/// InstanceError if the initial condition fails or mode parameters are missing.
VerificationReport verify(const ProcessSpec& spec, const ProcessPlugin& plugin, std::size_t count,
                          std::uint64_t seed, const VerifyOptions& options = {});

/// verify() once per anchor y_hat, re-solving the ODE each time. Every
/// anchor must lie in D with max_k |Y_k(0) - y_hat_k n| <= lambda n.
std::vector<VerificationReport> verify_multi_anchor(const ProcessSpec& spec,
                                                    const ProcessPlugin& plugin, std::size_t count,
                                                    std::uint64_t seed,
                                                    const std::vector<std::vector<double>>& anchors,
                                                    const VerifyOptions& options = {});

nlohmann::json to_json(const VerificationReport& report);

/// Version of the report JSON layout.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace dem
