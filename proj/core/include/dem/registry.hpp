#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "dem/drift.hpp"
#include "dem/process.hpp"

namespace dem {

using DriftFactory = std::function<Drift(const nlohmann::json& params)>;
using PluginFactory =
    std::function<std::shared_ptr<const ProcessPlugin>(const nlohmann::json& params)>;

/// Name -> factory tables for drift functions and process plugins.
class Registry {
 public:
  void add_drift(const std::string& name, DriftFactory factory);
  void add_process(const std::string& name, PluginFactory factory);

  bool has_drift(const std::string& name) const { return drifts_.count(name) != 0; }
  bool has_process(const std::string& name) const { return processes_.count(name) != 0; }

  /// Throws SchemaError for unknown names.
  Drift make_drift(const std::string& name, const nlohmann::json& params) const;
  std::shared_ptr<const ProcessPlugin> make_process(const std::string& name,
                                                    const nlohmann::json& params) const;

 private:
  std::map<std::string, DriftFactory> drifts_;
  std::map<std::string, PluginFactory> processes_;
};

}  // namespace dem
