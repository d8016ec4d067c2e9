#include "dem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dem/error.hpp"
#include "dem/inequalities.hpp"
#include "dem/rng.hpp"

namespace dem {

std::string_view to_string(ExtensionMode mode) {
  switch (mode) {
    case ExtensionMode::kPlain: return "plain";
    case ExtensionMode::kSideEvents: return "side-events";
    case ExtensionMode::kAveraged: return "averaged";
    case ExtensionMode::kTruncated: return "truncated";
  }
  return "plain";
}

ExtensionMode parse_extension_mode(std::string_view name) {
  for (auto m : {ExtensionMode::kPlain, ExtensionMode::kSideEvents, ExtensionMode::kAveraged,
                 ExtensionMode::kTruncated}) {
    if (to_string(m) == name) return m;
  }
  throw SchemaError("unknown mode '" + std::string(name) +
                    "' (expected plain, side-events, averaged or truncated)");
}

std::string_view to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::kPass: return "pass";
    case ReportStatus::kFail: return "fail";
    case ReportStatus::kHypothesesFailed: return "hypotheses-failed";
    case ReportStatus::kVacuous: return "vacuous";
  }
  return "fail";
}

GronwallReplay replay_gronwall(const Trajectory& traj, const OdeSolution& sol,
                               const ProcessSpec& spec, const ReplayConstants& constants,
                               std::int64_t limit) {
  if (!traj.full()) throw InstanceError("Gronwall replay needs a full path");
  const std::size_t a = traj.dimension;
  const std::int64_t n = spec.n();
  const double nd = static_cast<double>(n);
  const double L = spec.lipschitz();
  const double T = sol.constants().T;
  const double lambda_n = spec.lambda() * nd;
  const double base = 2.0 * lambda_n + constants.initial_slack;
  const double per_step = L / nd * constants.R + constants.delta;
  const double horizon_steps =
      L > 0.0 ? std::min(T * nd, nd / L) : T * nd;
  const double gronwall_constant = base + constants.R + constants.delta * horizon_steps;
  const double ceiling = 3.0 * lambda_n * std::exp(L * T);

  limit = std::min(limit, traj.stop_index);
  GronwallReplay out;
  out.applicable = true;
  std::vector<double> ref(a);
  double sum = 0.0;
  for (std::int64_t j = 0; j <= limit; ++j) {
    sol.at(static_cast<double>(j) / nd, ref);
    const auto y = traj.state(static_cast<std::size_t>(j));
    double dev = 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      dev = std::max(dev, std::abs(static_cast<double>(y[k]) - ref[k] * nd));
    }
    const bool rec_ok = dev < base + sum;
    const double bound = gronwall_constant * std::exp(L * static_cast<double>(j) / nd);
    const bool final_ok = dev < bound && bound <= ceiling * (1.0 + 1e-12);
    if (!rec_ok) out.recurrence_holds = false;
    if (!final_ok) out.final_bound_holds = false;
    if ((!rec_ok || !final_ok) && !out.first_failure) out.first_failure = j;
    sum += L / nd * dev + per_step;
  }
  return out;
}

double mode_failure_probability(const ProcessSpec& spec, double T, ExtensionMode mode) {
  const auto a = static_cast<std::int64_t>(spec.a());
  const auto& ext = spec.extensions();
  switch (mode) {
    case ExtensionMode::kPlain:
    case ExtensionMode::kSideEvents:
      return theorem_failure_probability(a, spec.n(), spec.lambda(), T, spec.beta());
    case ExtensionMode::kAveraged:
      if (!ext.b) throw InstanceError("averaged mode needs extensions.b");
      return freedman_failure_probability(a, spec.n(), spec.lambda(), T, spec.beta(), *ext.b);
    case ExtensionMode::kTruncated:
      if (!ext.gamma || !ext.hard_bound || !ext.x) {
        throw InstanceError("truncated mode needs extensions.gamma, extensions.B and extensions.x");
      }
      return truncated_failure_probability(a, spec.n(), spec.lambda(), T, spec.beta(), *ext.gamma,
                                           *ext.x);
  }
  return 2.0 * static_cast<double>(a);
}

namespace {

EventPredicate spec_event(const ProcessSpec& spec) {
  auto bounds = spec.side_events();
  return [bounds](std::int64_t, std::span<const std::int64_t> y) {
    return std::all_of(bounds.begin(), bounds.end(), [&](const CountBound& b) { return b.holds(y); });
  };
}

}  // namespace

VerificationReport verify(const ProcessSpec& spec, const ProcessPlugin& plugin, std::size_t count,
                          std::uint64_t seed, const VerifyOptions& options) {
  if (count < 1) throw InstanceError("verification needs at least one trajectory");
  const ExtensionMode mode = options.mode;
  const bool truncated = mode == ExtensionMode::kTruncated;
  const auto& ext = spec.extensions();

  EventPredicate event;
  if (mode == ExtensionMode::kSideEvents) {
    if (options.event) {
      event = options.event;
    } else if (!spec.side_events().empty()) {
      event = spec_event(spec);
    } else {
      throw InstanceError("side-events mode needs an event predicate or spec side_events");
    }
  }

  VerificationReport rep;
  rep.mode = mode;
  rep.check = options.check;
  rep.n = spec.n();
  rep.a = spec.a();
  rep.lipschitz = spec.lipschitz();
  rep.delta = spec.delta();
  rep.beta = spec.beta();
  rep.lambda = spec.lambda();
  rep.anchor.assign(spec.y_hat().begin(), spec.y_hat().end());
  rep.extensions = ext;
  rep.seed = seed;

  rep.drift_bound = compute_RT(spec);
  const double R = rep.drift_bound.R;
  const double T = rep.drift_bound.T;
  rep.failure_probability = mode_failure_probability(spec, T, mode);
  if (mode == ExtensionMode::kAveraged) {
    rep.failure_probability_two_term = freedman_two_term_probability(
        static_cast<std::int64_t>(spec.a()), spec.n(), spec.lambda(), T, spec.beta(), *ext.b);
    rep.notes.emplace_back(
        "two-term averaged-step bound evaluated exactly as printed; reference constants unverified");
  }
  if (mode == ExtensionMode::kSideEvents) {
    rep.notes.emplace_back("deviation restricted to 0 <= i <= min(sigma n, I)");
  }

  rep.admissibility = check_lambda_admissible(spec, R, T, truncated);
  if (!rep.admissibility.admissible) throw InadmissibleLambda(rep.admissibility.inequality);

  {
    const auto probe = plugin.start(spec.n());
    if (!check_initial_condition(spec, probe->observe())) {
      throw InstanceError("initial condition fails: max_k |Y_k(0) - y_hat_k n| > lambda n");
    }
  }

  const OdeSolution sol = solve_ode(spec, R, T);
  rep.constants = sol.constants();
  rep.vacuous = sol.sigma() == 0.0;
  const double nd = static_cast<double>(spec.n());
  rep.theoretical_envelope = rep.constants.margin * nd;
  const double lambda_n = spec.lambda() * nd;

  HypothesisOptions hyp_opts;
  hyp_opts.mode = options.check;
  hyp_opts.rule = truncated ? BoundRule::kTruncated : BoundRule::kWorstCase;
  hyp_opts.average_step = mode == ExtensionMode::kAveraged;

  ReplayConstants replay_constants;
  replay_constants.R = R;
  replay_constants.delta = spec.delta();
  if (truncated) {
    replay_constants.initial_slack = *ext.x * *ext.hard_bound;
    replay_constants.delta += *ext.gamma * *ext.hard_bound;
  }
  const std::int64_t sigma_steps = floor_tn(sol.sigma(), spec.n());

  rep.trajectories.resize(count);
  parallel_for(count, options.jobs, [&](std::size_t idx) {
    SimulationOptions sim;
    sim.keep_full_path = true;
    sim.reference = &sol;
    sim.event = event;
    const std::uint64_t s = derive_seed(seed, idx);
    const Trajectory traj = simulate(plugin, spec, s, sim);

    TrajectoryOutcome& out = rep.trajectories[idx];
    out.seed = s;
    out.stop_index = traj.stop_index;
    out.event_index = traj.event_index;
    out.checked_until = std::min(sigma_steps, traj.stop_index);
    if (traj.event_index) out.checked_until = std::min(out.checked_until, *traj.event_index);
    out.sup_deviation = traj.sup_deviation.value_or(0.0);
    out.envelope_violated = out.sup_deviation >= rep.theoretical_envelope;
    out.hypotheses = check_hypotheses(traj, spec, hyp_opts, &sol);

    const MartingalePart m = doob_decompose(traj);
    std::int64_t m_end = traj.stop_index;
    if (traj.event_index) m_end = std::min(m_end, *traj.event_index);
    double max_m = 0.0;
    for (std::int64_t j = 0; j <= m_end; ++j) {
      for (std::size_t k = 0; k < m.dimension(); ++k) max_m = std::max(max_m, std::abs(m.at(k, j)));
    }
    out.max_martingale = max_m;
    out.martingale_event = max_m < lambda_n;
    if (out.martingale_event && out.hypotheses.total() == 0) {
      out.replay = replay_gronwall(traj, sol, spec, replay_constants, out.checked_until);
    }
  });

  for (const auto& t : rep.trajectories) {
    rep.failure_count += t.envelope_violated ? 1 : 0;
    rep.martingale_failure_count += t.martingale_event ? 0 : 1;
    rep.hypothesis_violations += t.hypotheses.total();
    if (t.replay.applicable) {
      ++rep.replay_checked;
      rep.replay_failures += t.replay.holds() ? 0 : 1;
    }
  }

  const double p = rep.failure_probability_display();
  const double c = static_cast<double>(count);
  rep.sampling_slack = 3.0 * std::sqrt(p * (1.0 - p) / c);
  rep.within_bound = static_cast<double>(rep.failure_count) / c <= p + rep.sampling_slack;

  if (rep.hypothesis_violations > 0) {
    rep.status = ReportStatus::kHypothesesFailed;
  } else if (rep.vacuous) {
    rep.status = ReportStatus::kVacuous;
  } else {
    rep.status = rep.within_bound ? ReportStatus::kPass : ReportStatus::kFail;
  }
  return rep;
}

std::vector<VerificationReport> verify_multi_anchor(const ProcessSpec& spec,
                                                    const ProcessPlugin& plugin, std::size_t count,
                                                    std::uint64_t seed,
                                                    const std::vector<std::vector<double>>& anchors,
                                                    const VerifyOptions& options) {
  if (anchors.empty()) throw InstanceError("at least one anchor required");
  const auto probe = plugin.start(spec.n());
  const auto y0 = probe->observe();
  const double nd = static_cast<double>(spec.n());
  for (std::size_t idx = 0; idx < anchors.size(); ++idx) {
    const auto& anchor = anchors[idx];
    const std::string where = "anchor " + std::to_string(idx);
    if (anchor.size() != spec.a()) throw InstanceError(where + " has wrong dimension");
    if (!spec.domain().contains(0.0, anchor)) throw InstanceError(where + " lies outside the domain");
    for (std::size_t k = 0; k < anchor.size(); ++k) {
      if (std::abs(static_cast<double>(y0[k]) - anchor[k] * nd) > spec.lambda() * nd * (1.0 + 1e-12)) {
        throw InstanceError(where + " is farther than lambda n from Y(0)");
      }
    }
  }
  std::vector<VerificationReport> reports;
  reports.reserve(anchors.size());
  for (const auto& anchor : anchors) {
    reports.push_back(verify(spec.with_anchor(anchor), plugin, count, seed, options));
    reports.back().notes.push_back("G_lambda approximated by " + std::to_string(anchors.size()) +
                                   " anchor(s)");
  }
  return reports;
}

}  // namespace dem
