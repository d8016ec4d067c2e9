#include "dem/ode.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dem/error.hpp"

namespace dem {

namespace {

int grid_resolution(std::size_t axes) {
  int r = kRGridResolution;
  auto total = [axes](int res) {
    double p = 1.0;
    for (std::size_t i = 0; i < axes; ++i) p *= res;
    return p;
  };
  while (r > 2 && total(r) > static_cast<double>(kMaxRGridPoints)) --r;
  return r;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

DriftBound compute_RT(const ProcessSpec& spec) {
  const Domain& dom = spec.domain();
  const std::size_t a = spec.a();
  const int res = grid_resolution(a + 1);

  std::vector<double> lo(a + 1), hi(a + 1);
  lo[0] = std::max(0.0, dom.t_lo());
  hi[0] = dom.t_hi();
  for (std::size_t k = 0; k < a; ++k) {
    lo[k + 1] = dom.lo()[k];
    hi[k + 1] = dom.hi()[k];
  }
  double mesh = 0.0;
  for (std::size_t d = 0; d <= a; ++d) mesh = std::max(mesh, (hi[d] - lo[d]) / (res - 1));

  std::vector<int> idx(a + 1, 0);
  std::vector<double> y(a), f(a);
  double grid_max = 0.0;
  auto coord = [&](std::size_t d) {
    return idx[d] == res - 1 ? hi[d] : lo[d] + (hi[d] - lo[d]) * idx[d] / (res - 1);
  };
  while (true) {
    for (std::size_t k = 0; k < a; ++k) y[k] = coord(k + 1);
    spec.drift().evaluate(coord(0), y, f);
    for (double v : f) {
      if (!std::isfinite(v)) throw InstanceError("drift is not finite inside the domain");
      grid_max = std::max(grid_max, std::abs(v));
    }
    std::size_t d = 0;
    while (d <= a && ++idx[d] == res) idx[d++] = 0;
    if (d > a) break;
  }

  DriftBound out;
  out.T = dom.t_hi();
  out.grid_max = grid_max;
  out.mesh = mesh;
  out.resolution = res;
  out.R = std::max(1.0, grid_max + spec.lipschitz() * mesh);
  return out;
}

double envelope_margin(double L, double T, double lambda) {
  return 3.0 * std::exp(L * T) * lambda;
}

std::int64_t ode_step_count(double T, std::int64_t n) {
  constexpr std::int64_t kMinSteps = 2048;
  constexpr std::int64_t kMaxSteps = std::int64_t{1} << 20;
  const auto tn = static_cast<std::int64_t>(std::ceil(T * static_cast<double>(n) - 1e-9));
  return std::max(kMinSteps, std::min(tn, kMaxSteps));
}

OdeSolution::OdeSolution(std::size_t a, std::vector<double> grid, std::vector<double> values,
                         Constants constants, double lipschitz, double step)
    : a_(a),
      grid_(std::move(grid)),
      values_(std::move(values)),
      constants_(constants),
      lipschitz_(lipschitz),
      step_(step) {
  if (grid_.empty() || values_.size() != grid_.size() * a_) {
    throw InstanceError("ODE solution grid and values disagree");
  }
}

void OdeSolution::at(double t, std::span<double> out) const {
  constexpr double kSlack = 1e-12;
  if (out.size() != a_) throw InstanceError("output has wrong dimension");
  const double last = grid_.back();
  if (t < -kSlack || t > last + kSlack * std::max(1.0, last)) {
    throw InstanceError("t = " + fmt_double(t) + " outside solution range [0, " +
                        fmt_double(last) + "]");
  }
  if (grid_.size() == 1 || t <= 0.0) {
    std::copy_n(values_.begin(), a_, out.begin());
    return;
  }
  if (t >= last) {
    std::copy_n(values_.end() - static_cast<std::ptrdiff_t>(a_), a_, out.begin());
    return;
  }
  // Grid is uniform except possibly the final interval; start from the guess.
  auto j = static_cast<std::size_t>(t / step_);
  j = std::min(j, grid_.size() - 2);
  while (j > 0 && grid_[j] > t) --j;
  while (j + 2 < grid_.size() && grid_[j + 1] < t) ++j;
  const double w = (t - grid_[j]) / (grid_[j + 1] - grid_[j]);
  for (std::size_t k = 0; k < a_; ++k) {
    out[k] = (1.0 - w) * value(j, k) + w * value(j + 1, k);
  }
}

std::vector<double> OdeSolution::at(double t) const {
  std::vector<double> out(a_);
  at(t, out);
  return out;
}

double OdeSolution::interpolation_error_bound() const {
  double ymax = 0.0;
  for (double v : values_) ymax = std::max(ymax, std::abs(v));
  return (constants_.R + lipschitz_ * ymax) * step_;
}

double compute_sigma(std::span<const double> grid, std::span<const double> values, std::size_t a,
                     const Domain& domain, double margin, std::ptrdiff_t* last_index) {
  if (values.size() != grid.size() * a) throw InstanceError("grid and values disagree");
  std::ptrdiff_t last = -1;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (domain.boundary_distance(grid[j], values.subspan(j * a, a)) < margin) break;
    last = static_cast<std::ptrdiff_t>(j);
  }
  if (last_index) *last_index = last;
  return last < 0 ? 0.0 : grid[static_cast<std::size_t>(last)];
}

namespace {

/// One RK4 step from (t, y) with step h. Returns false, leaving `next`
/// unspecified, if any stage point lies outside the domain.
bool rk4_step_checked(const ProcessSpec& spec, double t, std::span<const double> y, double h,
                      std::span<double> next) {
  const std::size_t a = y.size();
  const Domain& dom = spec.domain();
  std::vector<double> k1(a), k2(a), k3(a), k4(a), tmp(a);

  spec.drift().evaluate(t, y, k1);
  for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
  if (!dom.contains(t + 0.5 * h, tmp)) return false;
  spec.drift().evaluate(t + 0.5 * h, tmp, k2);
  for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
  if (!dom.contains(t + 0.5 * h, tmp)) return false;
  spec.drift().evaluate(t + 0.5 * h, tmp, k3);
  for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + h * k3[k];
  if (!dom.contains(t + h, tmp)) return false;
  spec.drift().evaluate(t + h, tmp, k4);
  for (std::size_t k = 0; k < a; ++k) {
    next[k] = y[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return true;
}

}  // namespace

OdeSolution solve_ode(const ProcessSpec& spec, double R, double T) {
  if (!(T > 0.0)) throw InstanceError("T must be positive");
  const std::size_t a = spec.a();
  const Domain& dom = spec.domain();
  const double margin = envelope_margin(spec.lipschitz(), T, spec.lambda());
  const std::int64_t steps = ode_step_count(T, spec.n());
  const double h = T / static_cast<double>(steps);

  std::vector<double> grid{0.0};
  std::vector<double> values(spec.y_hat().begin(), spec.y_hat().end());
  std::vector<double> next(a);

  if (dom.boundary_distance(0.0, spec.y_hat()) >= margin) {
    for (std::int64_t j = 0; j < steps; ++j) {
      const double t = static_cast<double>(j) * h;
      std::span<const double> y(values.data() + values.size() - a, a);
      if (!rk4_step_checked(spec, t, y, h, next)) {
        // One retry with half the step, then stop either way.
        if (rk4_step_checked(spec, t, y, 0.5 * h, next) &&
            dom.boundary_distance(t + 0.5 * h, next) >= margin) {
          grid.push_back(t + 0.5 * h);
          values.insert(values.end(), next.begin(), next.end());
        }
        break;
      }
      const double t_next = static_cast<double>(j + 1) * h;
      if (dom.boundary_distance(t_next, next) < margin) break;
      grid.push_back(t_next);
      values.insert(values.end(), next.begin(), next.end());
    }
  }

  Constants c;
  c.R = R;
  c.T = T;
  c.margin = margin;
  c.sigma = compute_sigma(grid, values, a, dom, margin);
  return OdeSolution(a, std::move(grid), std::move(values), c, spec.lipschitz(), h);
}

OdeSolution solve_ode(const ProcessSpec& spec) {
  const DriftBound rt = compute_RT(spec);
  return solve_ode(spec, rt.R, rt.T);
}

std::vector<double> rk4_integrate(const DriftFn& f, std::span<const double> y0, double t0,
                                  double t1, std::int64_t steps) {
  if (steps < 1) throw InstanceError("steps must be positive");
  const std::size_t a = y0.size();
  const double h = (t1 - t0) / static_cast<double>(steps);
  std::vector<double> out;
  out.reserve((static_cast<std::size_t>(steps) + 1) * a);
  out.insert(out.end(), y0.begin(), y0.end());
  std::vector<double> y(y0.begin(), y0.end()), k1(a), k2(a), k3(a), k4(a), tmp(a);
  for (std::int64_t j = 0; j < steps; ++j) {
    const double t = t0 + static_cast<double>(j) * h;
    f(t, y, k1);
    for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t k = 0; k < a; ++k) tmp[k] = y[k] + h * k3[k];
    f(t + h, tmp, k4);
    for (std::size_t k = 0; k < a; ++k) {
      y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

Admissibility check_lambda_admissible(const ProcessSpec& spec, double R, double T,
                                      bool truncated) {
  const double L = spec.lipschitz();
  const double time_factor = L > 0.0 ? std::min(T, 1.0 / L) : T;
  const double n = static_cast<double>(spec.n());
  Admissibility out;
  if (truncated) {
    const auto& ext = spec.extensions();
    if (!ext.gamma || !ext.hard_bound || !ext.x) {
      throw InstanceError("truncated mode needs gamma, B and x");
    }
    const double gB = *ext.gamma * *ext.hard_bound;
    out.threshold = (spec.delta() + gB) * time_factor + (R + *ext.x * *ext.hard_bound) / n;
    out.inequality = "lambda >= (delta + gamma*B)*min{T, 1/L} + (R + x*B)/n";
  } else {
    out.threshold = spec.delta() * time_factor + R / n;
    out.inequality = "lambda >= delta*min{T, 1/L} + R/n";
  }
  out.admissible = spec.lambda() >= out.threshold;
  out.inequality += ": " + fmt_double(spec.lambda()) + (out.admissible ? " >= " : " < ") +
                    fmt_double(out.threshold);
  return out;
}

bool range_check(const OdeSolution& sol, std::span<const Interval> bounds, double lambda) {
  if (!(lambda > 0.0) || lambda > kRangeCheckMaxLambda) {
    throw InstanceError("range_check requires 0 < lambda <= 0.01");
  }
  if (bounds.size() != sol.dimension()) throw InstanceError("one interval per coordinate required");
  const double margin = envelope_margin(sol.lipschitz(), sol.constants().T, lambda);
  for (std::size_t j = 0; j < sol.size(); ++j) {
    if (sol.grid()[j] > sol.sigma()) break;
    for (std::size_t k = 0; k < sol.dimension(); ++k) {
      const double v = sol.value(j, k);
      if (v < bounds[k].lo - margin || v > bounds[k].hi + margin) return false;
    }
  }
  return true;
}

double estimate_lipschitz_lower_bound(const ProcessSpec& spec, std::uint64_t seed, int samples) {
  const Domain& dom = spec.domain();
  const std::size_t a = spec.a();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double t_lo = std::max(0.0, dom.t_lo());
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::vector<double> y(a), y2(a), f(a), f2(a);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = draw(t_lo, dom.t_hi());
    for (std::size_t k = 0; k < a; ++k) y[k] = draw(dom.lo()[k], dom.hi()[k]);
    // Nearby partner: relative step 1e-3 of each side length, clamped to the box.
    double t2 = std::clamp(t + (unit(rng) - 0.5) * 2e-3 * (dom.t_hi() - t_lo), t_lo, dom.t_hi());
    double dist = std::abs(t2 - t);
    for (std::size_t k = 0; k < a; ++k) {
      const double w = dom.hi()[k] - dom.lo()[k];
      y2[k] = std::clamp(y[k] + (unit(rng) - 0.5) * 2e-3 * w, dom.lo()[k], dom.hi()[k]);
      dist = std::max(dist, std::abs(y2[k] - y[k]));
    }
    if (dist == 0.0) continue;
    spec.drift().evaluate(t, y, f);
    spec.drift().evaluate(t2, y2, f2);
    for (std::size_t k = 0; k < a; ++k) best = std::max(best, std::abs(f2[k] - f[k]) / dist);
  }
  return best;
}

}  // namespace dem
