#include "dem/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dem/error.hpp"
#include "dem/inequalities.hpp"
#include "dem/rng.hpp"

namespace dem {

void FlagTotals::add(std::uint8_t f) {
  boundedness += (f & kFlagBoundedness) ? 1 : 0;
  trend += (f & kFlagTrend) ? 1 : 0;
  average_step += (f & kFlagAverageStep) ? 1 : 0;
  exceedance += (f & kFlagExceedance) ? 1 : 0;
  hard_bound += (f & kFlagHardBound) ? 1 : 0;
}

std::span<const std::int64_t> Trajectory::at_step(std::int64_t i) const {
  if (!full()) throw InstanceError("trajectory is thinned; full path required");
  if (i < 0 || i > stop_index) throw InstanceError("step index outside recorded path");
  return state(static_cast<std::size_t>(i));
}

namespace {

bool exceeds(double value, double bound) {
  return value > bound + kHypothesisTolerance * std::max(1.0, std::abs(bound));
}

}  // namespace

Trajectory simulate(const ProcessPlugin& plugin, const ProcessSpec& spec, std::uint64_t seed,
                    const SimulationOptions& options) {
  const std::size_t a = spec.a();
  if (plugin.dimension() != a) {
    throw InstanceError("plugin '" + std::string(plugin.name()) + "' has dimension " +
                        std::to_string(plugin.dimension()) + ", spec has " + std::to_string(a));
  }
  const std::int64_t n = spec.n();
  const double nd = static_cast<double>(n);
  const std::int64_t cap = spec.step_cap();
  const Domain& dom = spec.domain();
  const Extensions& ext = spec.extensions();

  Trajectory traj;
  traj.dimension = a;
  traj.seed = seed;
  traj.stride = options.keep_full_path ? 1 : std::max<std::int64_t>(1, (n + 999) / 1000);

  auto proc = plugin.start(n);
  RngSource rng(seed);

  std::vector<std::int64_t> prev(a);
  std::vector<double> y(a), f(a), drift(a), aux(a), ref(a);

  const bool track_average = ext.b.has_value() && proc->mean_abs_step(aux);
  const bool track_exceedance =
      ext.gamma.has_value() && proc->exceedance_probability(spec.beta(), aux);

  std::int64_t deviation_limit = -1;
  if (options.reference) {
    deviation_limit = floor_tn(options.reference->sigma(), n);
    traj.sup_deviation = 0.0;
  }

  auto record = [&](std::int64_t i, bool with_step, std::uint8_t flags) {
    traj.indices.push_back(i);
    traj.counts.insert(traj.counts.end(), prev.begin(), prev.end());
    if (with_step) {
      traj.drifts.insert(traj.drifts.end(), drift.begin(), drift.end());
      traj.flags.push_back(flags);
    }
  };

  for (std::int64_t i = 0;; ++i) {
    const auto current = proc->observe();
    std::copy(current.begin(), current.end(), prev.begin());
    const double t = static_cast<double>(i) / nd;
    for (std::size_t k = 0; k < a; ++k) y[k] = static_cast<double>(prev[k]) / nd;

    if (options.event && !traj.event_index && !options.event(i, prev)) traj.event_index = i;

    if (options.reference && i <= deviation_limit &&
        (!traj.event_index || i <= *traj.event_index)) {
      options.reference->at(t, ref);
      double dev = 0.0;
      for (std::size_t k = 0; k < a; ++k) {
        dev = std::max(dev, std::abs(static_cast<double>(prev[k]) - ref[k] * nd));
      }
      traj.sup_deviation = std::max(*traj.sup_deviation, dev);
    }

    if (i >= cap || !dom.contains(t, y)) {
      traj.stop_index = i;
      record(i, false, 0);
      break;
    }

    std::uint8_t flags = 0;
    proc->drift(drift);
    spec.drift().evaluate(t, y, f);
    for (std::size_t k = 0; k < a; ++k) {
      if (exceeds(std::abs(drift[k] - f[k]), spec.delta())) flags |= kFlagTrend;
    }
    if (track_average) {
      proc->mean_abs_step(aux);
      for (double v : aux) {
        if (exceeds(v, *ext.b)) flags |= kFlagAverageStep;
      }
    }
    if (track_exceedance) {
      proc->exceedance_probability(spec.beta(), aux);
      for (double v : aux) {
        if (exceeds(v, *ext.gamma)) flags |= kFlagExceedance;
      }
    }

    try {
      proc->step(rng);
    } catch (const std::exception&) {
      traj.invalid_at = i;
      traj.stop_index = i;
      record(i, false, 0);
      break;
    }

    const auto next = proc->observe();
    for (std::size_t k = 0; k < a; ++k) {
      const double step = std::abs(static_cast<double>(next[k] - prev[k]));
      if (exceeds(step, spec.beta())) flags |= kFlagBoundedness;
      if (ext.hard_bound && exceeds(step, *ext.hard_bound)) flags |= kFlagHardBound;
    }
    traj.flag_totals.add(flags);
    if (i % traj.stride == 0) record(i, true, flags);
  }
  return traj;
}

MartingalePart::MartingalePart(std::size_t a, std::vector<double> values)
    : a_(a), values_(std::move(values)) {}

double MartingalePart::max_abs(std::size_t k) const {
  double m = 0.0;
  for (std::size_t idx = k; idx < values_.size(); idx += a_) m = std::max(m, std::abs(values_[idx]));
  return m;
}

double MartingalePart::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

MartingalePart doob_decompose(const Trajectory& traj) {
  const std::size_t a = traj.dimension;
  const auto steps = static_cast<std::size_t>(traj.stop_index);
  if (!traj.full()) throw InstanceError("Doob decomposition needs a full path");
  if (traj.drifts.size() != steps * a || traj.rows() != steps + 1) {
    throw InstanceError("trajectory is missing drift records");
  }
  std::vector<double> m((steps + 1) * a, 0.0);
  for (std::size_t j = 0; j < steps; ++j) {
    const auto y0 = traj.state(j);
    const auto y1 = traj.state(j + 1);
    const auto d = traj.drift(j);
    for (std::size_t k = 0; k < a; ++k) {
      m[(j + 1) * a + k] = m[j * a + k] + static_cast<double>(y1[k] - y0[k]) - d[k];
    }
  }
  return MartingalePart(a, std::move(m));
}

HypothesisSummary check_hypotheses(const Trajectory& traj, const ProcessSpec& spec,
                                   const HypothesisOptions& options, const OdeSolution* sol) {
  if (!traj.full()) throw InstanceError("hypothesis check needs a full path");
  const bool proof = options.mode == CheckMode::kProofStructure;
  if (proof && !sol) throw InstanceError("proof-structure mode needs the ODE solution");
  if (options.rule == BoundRule::kTruncated && !spec.extensions().hard_bound) {
    throw InstanceError("truncated bound rule needs B");
  }

  const std::size_t a = traj.dimension;
  const std::int64_t n = spec.n();
  const double nd = static_cast<double>(n);
  const std::int64_t cap = spec.step_cap();
  std::int64_t end = traj.stop_index;
  if (traj.event_index) end = std::min(end, *traj.event_index);

  double envelope = 0.0;
  std::int64_t sigma_limit = -1;
  if (proof) {
    envelope = sol->constants().margin * nd;
    sigma_limit = floor_tn(sol->sigma(), n);
  }
  const double bound =
      options.rule == BoundRule::kTruncated ? *spec.extensions().hard_bound : spec.beta();

  HypothesisSummary out;
  std::vector<double> y(a), f(a), ref(a);
  for (std::int64_t i = 0; i < end; ++i) {
    const auto cur = traj.state(static_cast<std::size_t>(i));
    const auto nxt = traj.state(static_cast<std::size_t>(i) + 1);
    const double t = static_cast<double>(i) / nd;
    if (proof) {
      if (i >= cap || i > sigma_limit) {
        ++out.exempt_steps;
        continue;
      }
      sol->at(t, ref);
      double dev = 0.0;
      for (std::size_t k = 0; k < a; ++k) {
        dev = std::max(dev, std::abs(static_cast<double>(cur[k]) - ref[k] * nd));
      }
      if (dev >= envelope) {
        ++out.exempt_steps;
        continue;
      }
    }
    ++out.checked_steps;

    for (std::size_t k = 0; k < a; ++k) y[k] = static_cast<double>(cur[k]) / nd;
    spec.drift().evaluate(t, y, f);
    const auto d = traj.drift(static_cast<std::size_t>(i));
    bool trend = false;
    bool bounded = false;
    for (std::size_t k = 0; k < a; ++k) {
      trend = trend || exceeds(std::abs(d[k] - f[k]), spec.delta());
      bounded = bounded || exceeds(std::abs(static_cast<double>(nxt[k] - cur[k])), bound);
    }
    const std::uint8_t rec = traj.flags[static_cast<std::size_t>(i)];
    const bool average = options.average_step && (rec & kFlagAverageStep);
    const bool exceed = options.rule == BoundRule::kTruncated && (rec & kFlagExceedance);

    out.trend_violations += trend;
    out.boundedness_violations += bounded;
    out.average_step_violations += average;
    out.exceedance_violations += exceed;
    if ((trend || bounded || average || exceed) && !out.first_violation) out.first_violation = i;
  }
  return out;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& f) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Ensemble run_ensemble(const ProcessPlugin& plugin, const ProcessSpec& spec, std::size_t count,
                      std::uint64_t base_seed, const EnsembleOptions& options) {
  if (count < 1) throw InstanceError("ensemble needs at least one trajectory");
  std::vector<Trajectory> trajectories(count);
  parallel_for(count, options.jobs, [&](std::size_t idx) {
    trajectories[idx] = simulate(plugin, spec, derive_seed(base_seed, idx), options.simulation);
  });
  return Ensemble{spec, base_seed, std::move(trajectories)};
}

}  // namespace dem
