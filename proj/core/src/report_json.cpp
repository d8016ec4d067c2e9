#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dem/verify.hpp"

namespace dem {
namespace {

using nlohmann::json;

// Reports carry 12 significant digits.
json num(double v) {
  if (!std::isfinite(v)) return json(nullptr);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return json(std::strtod(buf, nullptr));
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json opt_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

json hypotheses_json(const HypothesisSummary& h) {
  return json{{"checked_steps", h.checked_steps},
              {"exempt_steps", h.exempt_steps},
              {"boundedness", h.boundedness_violations},
              {"trend", h.trend_violations},
              {"average_step", h.average_step_violations},
              {"exceedance", h.exceedance_violations},
              {"first_violation", opt_int(h.first_violation)}};
}

}  // namespace

json to_json(const VerificationReport& r) {
  json trajectories = json::array();
  for (const auto& t : r.trajectories) {
    trajectories.push_back(json{
        {"seed", t.seed},
        {"stop_index", t.stop_index},
        {"event_index", opt_int(t.event_index)},
        {"checked_until", t.checked_until},
        {"sup_deviation", num(t.sup_deviation)},
        {"envelope_violated", t.envelope_violated},
        {"max_martingale", num(t.max_martingale)},
        {"martingale_event", t.martingale_event},
        {"hypotheses", hypotheses_json(t.hypotheses)},
        {"gronwall_replay",
         {{"applicable", t.replay.applicable},
          {"recurrence_holds", t.replay.recurrence_holds},
          {"final_bound_holds", t.replay.final_bound_holds},
          {"first_failure", opt_int(t.replay.first_failure)}}},
    });
  }
  json anchor = json::array();
  for (double v : r.anchor) anchor.push_back(num(v));

  return json{
      {"schema", kReportSchemaVersion},
      {"status", std::string(to_string(r.status))},
      {"extension_mode", std::string(to_string(r.mode))},
      {"check_mode", r.check == CheckMode::kStrict ? "strict" : "proof-structure"},
      {"parameters",
       {{"n", r.n},
        {"a", r.a},
        {"L", num(r.lipschitz)},
        {"delta", num(r.delta)},
        {"beta", num(r.beta)},
        {"lambda", num(r.lambda)},
        {"y_hat", anchor},
        {"b", opt_num(r.extensions.b)},
        {"gamma", opt_num(r.extensions.gamma)},
        {"B", opt_num(r.extensions.hard_bound)},
        {"x", opt_num(r.extensions.x)}}},
      {"constants",
       {{"R", num(r.constants.R)},
        {"T", num(r.constants.T)},
        {"sigma", num(r.constants.sigma)},
        {"margin", num(r.constants.margin)},
        {"R_grid_max", num(r.drift_bound.grid_max)},
        {"R_grid_mesh", num(r.drift_bound.mesh)},
        {"R_grid_resolution", r.drift_bound.resolution}}},
      {"lambda_admissible",
       {{"admissible", r.admissibility.admissible},
        {"threshold", num(r.admissibility.threshold)},
        {"inequality", r.admissibility.inequality}}},
      {"theoretical_envelope", num(r.theoretical_envelope)},
      {"failure_probability", num(r.failure_probability)},
      {"failure_probability_display", num(r.failure_probability_display())},
      {"failure_probability_two_term", opt_num(r.failure_probability_two_term)},
      {"ensemble_size", r.count()},
      {"seed", r.seed},
      {"failure_count", r.failure_count},
      {"martingale_failure_count", r.martingale_failure_count},
      {"hypothesis_violations", r.hypothesis_violations},
      {"gronwall_replay_checked", r.replay_checked},
      {"gronwall_replay_failures", r.replay_failures},
      {"sampling_slack", num(r.sampling_slack)},
      {"within_bound", r.within_bound},
      {"vacuous", r.vacuous},
      {"notes", r.notes},
      {"trajectories", trajectories},
  };
}

}  // namespace dem
