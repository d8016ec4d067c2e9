#include "dem/registry.hpp"

#include "dem/error.hpp"

namespace dem {

void Registry::add_drift(const std::string& name, DriftFactory factory) {
  drifts_[name] = std::move(factory);
}

void Registry::add_process(const std::string& name, PluginFactory factory) {
  processes_[name] = std::move(factory);
}

Drift Registry::make_drift(const std::string& name, const nlohmann::json& params) const {
  auto it = drifts_.find(name);
  if (it == drifts_.end()) throw SchemaError("unknown drift plugin '" + name + "'");
  return it->second(params);
}

std::shared_ptr<const ProcessPlugin> Registry::make_process(const std::string& name,
                                                            const nlohmann::json& params) const {
  auto it = processes_.find(name);
  if (it == processes_.end()) throw SchemaError("unknown process plugin '" + name + "'");
  return it->second(params);
}

}  // namespace dem
