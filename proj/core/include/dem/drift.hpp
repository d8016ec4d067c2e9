#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dem {

/// Writes F_1..F_a evaluated at (t, y) into out.
using DriftFn = std::function<void(double t, std::span<const double> y, std::span<double> out)>;

/// The drift functions F_k of a process, tagged with the plugin name and
/// parameters they were built from so a spec can be written back to JSON.
class Drift {
 public:
  Drift(std::string plugin, nlohmann::json params, std::size_t dimension, DriftFn fn);

  const std::string& plugin() const { return plugin_; }
  const nlohmann::json& params() const { return params_; }
  std::size_t dimension() const { return dimension_; }

  void evaluate(double t, std::span<const double> y, std::span<double> out) const;
  std::vector<double> operator()(double t, std::span<const double> y) const;

 private:
  std::string plugin_;
  nlohmann::json params_;
  std::size_t dimension_;
  DriftFn fn_;
};

}  // namespace dem
