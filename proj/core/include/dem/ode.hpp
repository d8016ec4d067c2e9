#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dem/drift.hpp"
#include "dem/process_spec.hpp"

namespace dem {

/// Derived constants of a ProcessSpec.
struct Constants {
  double R = 1.0;       // drift magnitude bound, R >= 1
  double T = 1.0;       // time horizon
  double sigma = 0.0;   // validity horizon of the ODE solution, in [0, T]
  double margin = 0.0;  // 3 e^{LT} lambda, rescaled units
};

/// Result of compute_RT with the grid diagnostics behind R.
struct DriftBound {
  double R = 1.0;
  double T = 1.0;
  double grid_max = 0.0;  // max_k |F_k| over the sampling grid
  double mesh = 0.0;      // largest per-axis grid spacing
  int resolution = 0;     // grid points per axis
};

/// Points per axis of the R sampling grid: 64, reduced for large a so that
/// the grid has at most kMaxRGridPoints points.
inline constexpr int kRGridResolution = 64;
inline constexpr std::int64_t kMaxRGridPoints = std::int64_t{1} << 22;

/// T = t_hi of the domain; R = max(1, grid max of |F_k| + L * mesh) over the
/// part of the box with t >= 0.
DriftBound compute_RT(const ProcessSpec& spec);

/// 3 e^{LT} lambda.
double envelope_margin(double L, double T, double lambda);

/// Number of RK4 steps on [0, T]: max(2048, min(ceil(T n), 2^20)).
std::int64_t ode_step_count(double T, std::int64_t n);

/// Dense solution y(t) on [0, sigma], piecewise linear between grid points.
class OdeSolution {
 public:
  OdeSolution(std::size_t a, std::vector<double> grid, std::vector<double> values,
              Constants constants, double lipschitz, double step);

  std::size_t dimension() const { return a_; }
  std::size_t size() const { return grid_.size(); }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t j) const { return {values_.data() + j * a_, a_}; }
  double value(std::size_t j, std::size_t k) const { return values_[j * a_ + k]; }
  const Constants& constants() const { return constants_; }
  double sigma() const { return constants_.sigma; }
  double lipschitz() const { return lipschitz_; }
  double step() const { return step_; }

  /// Linear interpolation; t must lie in [0, sigma] (up to 1e-12 slack).
  void at(double t, std::span<double> out) const;
  std::vector<double> at(double t) const;

  /// Documented interpolation error per interval: (R + L max|y|) h.
  double interpolation_error_bound() const;

 private:
  std::size_t a_;
  std::vector<double> grid_;
  std::vector<double> values_;
  Constants constants_;
  double lipschitz_;
  double step_;
};

/// Largest grid time t_j such that every grid point s <= j has boundary
/// distance >= margin; 0 if the initial point already fails. Also returns
/// the index j through `last_index` (or -1 when even j = 0 fails).
double compute_sigma(std::span<const double> grid, std::span<const double> values, std::size_t a,
                     const Domain& domain, double margin, std::ptrdiff_t* last_index = nullptr);

/// Classical RK4 with fixed step on [0, T], halted once the solution comes
/// within `margin` of the boundary. Grid ends at sigma.
OdeSolution solve_ode(const ProcessSpec& spec, double R, double T);

/// Convenience: compute_RT followed by solve_ode.
OdeSolution solve_ode(const ProcessSpec& spec);

/// Plain RK4 on [t0, t1] with `steps` equal steps, no domain checks. Returns
/// the packed trajectory ((steps+1) x a).
std::vector<double> rk4_integrate(const DriftFn& f, std::span<const double> y0, double t0,
                                  double t1, std::int64_t steps);

struct Admissibility {
  bool admissible = false;
  double threshold = 0.0;
  std::string inequality;  // human-readable form of the checked inequality
};

/// lambda >= delta min{T, 1/L} + R/n, or in truncated mode
/// lambda >= (delta + gamma B) min{T, 1/L} + (R + x B)/n.
Admissibility check_lambda_admissible(const ProcessSpec& spec, double R, double T,
                                      bool truncated = false);

struct Interval {
  double lo;
  double hi;
};

/// Largest lambda accepted by range_check.
inline constexpr double kRangeCheckMaxLambda = 0.01;

/// True iff every grid value y_k(t_j), t_j <= sigma, lies within
/// [A_k - 3e^{LT} lambda, B_k + 3e^{LT} lambda].
bool range_check(const OdeSolution& sol, std::span<const Interval> bounds, double lambda);

/// Largest ratio |F_k(x) - F_k(x')| / |x - x'|_inf over random nearby pairs
/// in the box. A lower bound on the true Lipschitz constant.
double estimate_lipschitz_lower_bound(const ProcessSpec& spec, std::uint64_t seed,
                                      int samples = 4096);

}  // namespace dem
