#pragma once

#include <cstdint>
#include <functional>

namespace dem {

// Closed-form evaluators for the inequalities behind the differential
// equation method. Preconditions are checked; violations throw
// InstanceError.

/// Continuous Gronwall: x(t) <= C + L int_0^t x  implies  x(t) <= C e^{Lt}.
double gronwall_continuous_bound(double C, double L, double t);

/// Stability of perturbed solutions: (lambda + delta T) e^{LT}.
double stability_bound(double lambda, double delta, double L, double T);

struct GronwallDiscreteParams {
  double c = 0.0;
  double b = 0.0;
  double a = 1.0;  // must be > 0
  std::int64_t m = 0;
};

/// Discrete Gronwall: x_j < c + sum_{i<j}(a x_i + b) for all j <= m implies
/// x_m < (c + b min{m, 1/a}) e^{am}.
double gronwall_discrete_bound(const GronwallDiscreteParams& p);

/// Azuma-Hoeffding maximal inequality 2 exp(-t^2 / (2 m c^2)).
/// For c = 0 the walk is constant: returns 0 for t > 0 and 2 for t = 0.
double azuma_bound(std::int64_t m, double c, double t);

/// Failure probability of the main theorem, 2a exp(-n lambda^2 / (8 T beta^2)).
double theorem_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                   double beta);

/// Failure probability under an average one-step bound b:
/// 2a exp(-min{n lambda^2 / (4 T beta b), n lambda / (4 beta)}).
double freedman_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                    double beta, double b);

/// The two-term form the min-form above is derived from:
/// 2a exp(-(lambda n)^2 / (2 T n beta b + 2 beta lambda n)). Never larger
/// than freedman_failure_probability.
double freedman_two_term_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                     double beta, double b);

/// Exact Pr(Z >= k) for Z ~ Bin(m, gamma), via the regularized incomplete beta I_gamma(k, m-k+1).
/// k <= 0 gives 1, k > m gives 0.
double binomial_tail(std::int64_t m, double gamma, std::int64_t k);

/// Union bound Pr(Z >= 1) <= T n gamma for Z ~ Bin(floor(Tn), gamma).
double binomial_tail_union_bound(double T, std::int64_t n, double gamma);

/// Pr(Z >= floor(x+1)) <= (e T n gamma / ceil(x))^ceil(x) for x > 0.
double binomial_tail_power_bound(double T, std::int64_t n, double gamma, double x);

/// Failure probability when large steps are truncated:
/// theorem term + a Pr(Z >= floor(x+1)), Z ~ Bin(floor(Tn), gamma).
double truncated_failure_probability(std::int64_t a, std::int64_t n, double lambda, double T,
                                     double beta, double gamma, double x);

/// Number of Simpson panels used by error_envelope.
inline constexpr int kEnvelopePanels = 1024;

/// xi(t) = lambda + int_0^t delta(s) ds by composite Simpson on
/// kEnvelopePanels panels (relative error below 1e-10 for smooth delta).
double error_envelope(double lambda, const std::function<double(double)>& delta, double t);

/// floor(T n) with representation error absorbed.
std::int64_t floor_tn(double T, std::int64_t n);

}  // namespace dem
