#include "dem/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "dem/error.hpp"

namespace dem {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InstanceError(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_theorem_args(std::int64_t a, std::int64_t n, double lambda, double T, double beta) {
  require(a >= 1, "a must be at least 1");
  require(n >= 1, "n must be at least 1");
  require(finite_nonneg(lambda), "lambda must be nonnegative");
  require(std::isfinite(T) && T > 0.0, "T must be positive");
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
}

}  // namespace

std::int64_t floor_tn(double T, std::int64_t n) {
  // Absorbs representation error such as 0.29 * 100 = 28.999999999999996.
  const double tn = T * static_cast<double>(n);
  return static_cast<std::int64_t>(std::floor(tn + 1e-9 * std::max(1.0, tn)));
}

double gronwall_continuous_bound(double C, double L, double t) {
  require(std::isfinite(t) && t >= 0.0, "t must be nonnegative");
  require(finite_nonneg(L), "L must be nonnegative");
  return C * std::exp(L * t);
}

double stability_bound(double lambda, double delta, double L, double T) {
  require(finite_nonneg(lambda) && finite_nonneg(delta) && finite_nonneg(L),
          "lambda, delta, L must be nonnegative");
  require(finite_nonneg(T), "T must be nonnegative");
  return (lambda + delta * T) * std::exp(L * T);
}

double gronwall_discrete_bound(const GronwallDiscreteParams& p) {
  require(std::isfinite(p.a) && p.a > 0.0, "discrete Gronwall needs a > 0");
  require(finite_nonneg(p.b) && finite_nonneg(p.c), "b and c must be nonnegative");
  require(p.m >= 0, "m must be nonnegative");
  const double m = static_cast<double>(p.m);
  return (p.c + p.b * std::min(m, 1.0 / p.a)) * std::exp(p.a * m);
}

double azuma_bound(std::int64_t m, double c, double t) {
  require(m >= 1, "m must be at least 1");
  require(finite_nonneg(c), "c must be nonnegative");
  require(finite_nonneg(t), "t must be nonnegative");
  if (t == 0.0) return 2.0;
  if (c == 0.0) return 0.0;
  return 2.0 * std::exp(-t * t / (2.0 * static_cast<double>(m) * c * c));
}

double theorem_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                   double beta) {
  check_theorem_args(a, n, lambda, T, beta);
  const double exponent = static_cast<double>(n) * lambda * lambda / (8.0 * T * beta * beta);
  return 2.0 * static_cast<double>(a) * std::exp(-exponent);
}

double freedman_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                    double beta, double b) {
  check_theorem_args(a, n, lambda, T, beta);
  require(std::isfinite(b) && b > 0.0, "b must be positive");
  const double nd = static_cast<double>(n);
  const double variance_branch = nd * lambda * lambda / (4.0 * T * beta * b);
  const double range_branch = nd * lambda / (4.0 * beta);
  return 2.0 * static_cast<double>(a) * std::exp(-std::min(variance_branch, range_branch));
}

double freedman_two_term_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                     double beta, double b) {
  check_theorem_args(a, n, lambda, T, beta);
  require(std::isfinite(b) && b > 0.0, "b must be positive");
  const double nd = static_cast<double>(n);
  const double dev = lambda * nd;
  const double denom = 2.0 * T * nd * beta * b + 2.0 * beta * dev;
  return 2.0 * static_cast<double>(a) * std::exp(-dev * dev / denom);
}

double binomial_tail(std::int64_t m, double gamma, std::int64_t k) {
  require(m >= 0, "m must be nonnegative");
  require(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  if (k <= 0) return 1.0;
  if (k > m) return 0.0;
  if (gamma == 0.0) return 0.0;
  if (gamma == 1.0) return 1.0;

  // P(Z >= k) = I_gamma(k, m - k + 1).
  const double tail =
      boost::math::ibeta(static_cast<double>(k), static_cast<double>(m - k + 1), gamma);
  return std::clamp(tail, 0.0, 1.0);
}

double binomial_tail_union_bound(double T, std::int64_t n, double gamma) {
  require(std::isfinite(T) && T > 0.0 && n >= 1, "T and n must be positive");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  return T * static_cast<double>(n) * gamma;
}

double binomial_tail_power_bound(double T, std::int64_t n, double gamma, double x) {
  require(std::isfinite(T) && T > 0.0 && n >= 1, "T and n must be positive");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  require(std::isfinite(x) && x > 0.0, "power bound needs x > 0");
  const double s = std::ceil(x);
  return std::pow(std::exp(1.0) * T * static_cast<double>(n) * gamma / s, s);
}

double truncated_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                     double beta, double gamma, double x) {
  require(finite_nonneg(x), "x must be nonnegative");
  const double base = theorem_failure_probability(a, n, lambda, T, beta);
  const auto k = static_cast<std::int64_t>(std::floor(x + 1.0));
  return base + static_cast<double>(a) * binomial_tail(floor_tn(T, n), gamma, k);
}

double error_envelope(double lambda, const std::function<double(double)>& delta, double t) {
  require(std::isfinite(t) && t >= 0.0, "t must be nonnegative");
  if (t == 0.0) return lambda;
  const int panels = kEnvelopePanels;
  const double h = t / panels;
  double odd = 0.0;
  double even = 0.0;
  for (int j = 1; j < panels; ++j) {
    const double v = delta(j * h);
    (j % 2 == 1 ? odd : even) += v;
  }
  const double integral = h / 3.0 * (delta(0.0) + 4.0 * odd + 2.0 * even + delta(t));
  return lambda + integral;
}

}  // namespace dem
