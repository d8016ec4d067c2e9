#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "dem/spec_json.hpp"

namespace dem::testing {

using nlohmann::json;

inline json box(double t_lo, double t_hi, std::vector<double> lo, std::vector<double> hi) {
  return {{"t_lo", t_lo}, {"t_hi", t_hi}, {"lo", lo}, {"hi", hi}};
}

inline json balls_doc(std::int64_t n, double lambda, double t_hi = 1.0, double t_lo = -0.1,
                      double y_lo = 0.05, double y_hi = 1.1) {
  return {{"schema", 1},
          {"n", n},
          {"drift", {{"plugin", "balls-in-bins"}}},
          {"L", 1.0},
          {"delta", 0.0},
          {"beta", 1.0},
          {"lambda", lambda},
          {"y_hat", {1.0}},
          {"domain", box(t_lo, t_hi, {y_lo}, {y_hi})}};
}

inline json degree_doc(std::int64_t n, int K, double lambda, double t_hi = 1.0) {
  std::vector<double> y_hat(static_cast<std::size_t>(K) + 1, 0.0);
  y_hat[0] = 1.0;
  return {{"schema", 1},
          {"n", n},
          {"drift", {{"plugin", "degree-process"}, {"params", {{"K", K}}}}},
          {"L", 4.0},
          {"delta", 0.0},
          {"beta", 2.0},
          {"lambda", lambda},
          {"y_hat", y_hat},
          {"domain", box(-0.1, t_hi, std::vector<double>(y_hat.size(), -0.1),
                         std::vector<double>(y_hat.size(), 1.1))}};
}

inline json greedy_doc(std::int64_t n, double lambda) {
  return {{"schema", 1},
          {"n", n},
          {"drift", {{"plugin", "greedy-matching"}}},
          {"L", 0.0},
          {"delta", 0.0},
          {"beta", 2.0},
          {"lambda", lambda},
          {"y_hat", {1.0}},
          {"domain", box(-0.1, 0.45, {-0.1}, {1.1})}};
}

inline json zero_doc(std::int64_t n, double lambda, std::vector<double> y_hat, double t_hi,
                     std::vector<double> lo, std::vector<double> hi) {
  return {{"schema", 1},
          {"n", n},
          {"drift", {{"plugin", "zero"}, {"params", {{"a", y_hat.size()}}}}},
          {"L", 0.0},
          {"delta", 0.0},
          {"beta", 1.0},
          {"lambda", lambda},
          {"y_hat", y_hat},
          {"domain", box(-0.1, t_hi, lo, hi)}};
}

inline ProcessSpec make_spec(const json& doc) { return spec_from_json(doc); }

}  // namespace dem::testing
