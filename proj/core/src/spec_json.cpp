#include "dem/spec_json.hpp"

#include <fstream>

#include "dem/error.hpp"

namespace dem {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw SchemaError(std::string("missing field '") + name + "'");
  }
  return obj.at(name);
}

double number(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_number()) throw SchemaError(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* name) {
  if (!obj.contains(name) || obj.at(name).is_null()) return std::nullopt;
  return number(obj, name);
}

std::vector<double> number_array(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_array()) throw SchemaError(std::string("field '") + name + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw SchemaError(std::string("field '") + name + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

PluginRef plugin_ref(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_object()) throw SchemaError(std::string("field '") + name + "' must be an object");
  const json& plugin = field(v, "plugin");
  if (!plugin.is_string()) throw SchemaError("plugin name must be a string");
  PluginRef ref{plugin.get<std::string>(), json::object()};
  if (v.contains("params")) {
    if (!v["params"].is_object()) throw SchemaError("plugin params must be an object");
    ref.params = v["params"];
  }
  return ref;
}

json plugin_json(const std::string& name, const json& params) {
  return json{{"plugin", name}, {"params", params.is_null() ? json::object() : params}};
}

ProcessSpec parse(const json& doc, const Registry& registry) {
  if (!doc.is_object()) throw SchemaError("spec must be a JSON object");
  const json& schema = field(doc, "schema");
  if (!schema.is_number_integer() || schema.get<int>() != kSpecSchemaVersion) {
    throw SchemaError("unsupported spec schema version (expected " +
                      std::to_string(kSpecSchemaVersion) + ")");
  }
  const json& n = field(doc, "n");
  if (!n.is_number_integer()) throw SchemaError("field 'n' must be an integer");

  const PluginRef drift_ref = plugin_ref(doc, "drift");
  Drift drift = registry.make_drift(drift_ref.name, drift_ref.params);

  std::optional<PluginRef> process;
  if (doc.contains("process")) {
    process = plugin_ref(doc, "process");
    if (!registry.has_process(process->name)) {
      throw SchemaError("unknown process plugin '" + process->name + "'");
    }
  }

  const json& dom = field(doc, "domain");
  Domain domain(number(dom, "t_lo"), number(dom, "t_hi"), number_array(dom, "lo"),
                number_array(dom, "hi"));

  Extensions ext;
  if (doc.contains("extensions")) {
    const json& e = doc["extensions"];
    if (!e.is_object()) throw SchemaError("field 'extensions' must be an object");
    ext.b = optional_number(e, "b");
    ext.gamma = optional_number(e, "gamma");
    ext.hard_bound = optional_number(e, "B");
    ext.x = optional_number(e, "x");
  }

  std::vector<CountBound> side_events;
  if (doc.contains("side_events")) {
    const json& list = doc["side_events"];
    if (!list.is_array()) throw SchemaError("field 'side_events' must be an array");
    for (const auto& item : list) {
      CountBound cb;
      const json& idx = field(item, "index");
      if (!idx.is_number_unsigned() && !idx.is_number_integer()) {
        throw SchemaError("side event 'index' must be an integer");
      }
      if (idx.get<std::int64_t>() < 0) throw SchemaError("side event 'index' must be >= 0");
      cb.index = idx.get<std::size_t>();
      if (item.contains("min")) cb.min = item["min"].get<std::int64_t>();
      if (item.contains("max")) cb.max = item["max"].get<std::int64_t>();
      side_events.push_back(cb);
    }
  }

  std::vector<double> y_hat = number_array(doc, "y_hat");
  if (doc.contains("a")) {
    const json& a = doc["a"];
    if (!a.is_number_integer() || a.get<std::int64_t>() != static_cast<std::int64_t>(y_hat.size())) {
      throw SchemaError("field 'a' does not match the length of 'y_hat'");
    }
  }

  return ProcessSpec(ProcessSpec::Params{
      .n = n.get<std::int64_t>(),
      .drift = std::move(drift),
      .lipschitz = number(doc, "L"),
      .delta = number(doc, "delta"),
      .beta = number(doc, "beta"),
      .lambda = number(doc, "lambda"),
      .y_hat = std::move(y_hat),
      .domain = std::move(domain),
      .process = std::move(process),
      .extensions = ext,
      .side_events = std::move(side_events),
  });
}

}  // namespace

ProcessSpec spec_from_json(const json& doc, const Registry& registry) {
  try {
    return parse(doc, registry);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("spec JSON: ") + e.what());
  }
}

json to_json(const ProcessSpec& spec) {
  const Domain& d = spec.domain();
  json doc{
      {"schema", kSpecSchemaVersion},
      {"a", spec.a()},
      {"n", spec.n()},
      {"drift", plugin_json(spec.drift().plugin(), spec.drift().params())},
      {"L", spec.lipschitz()},
      {"delta", spec.delta()},
      {"beta", spec.beta()},
      {"lambda", spec.lambda()},
      {"y_hat", std::vector<double>(spec.y_hat().begin(), spec.y_hat().end())},
      {"domain",
       {{"t_lo", d.t_lo()},
        {"t_hi", d.t_hi()},
        {"lo", std::vector<double>(d.lo().begin(), d.lo().end())},
        {"hi", std::vector<double>(d.hi().begin(), d.hi().end())}}},
  };
  if (spec.process()) doc["process"] = plugin_json(spec.process()->name, spec.process()->params);
  const auto& ext = spec.extensions();
  json e = json::object();
  if (ext.b) e["b"] = *ext.b;
  if (ext.gamma) e["gamma"] = *ext.gamma;
  if (ext.hard_bound) e["B"] = *ext.hard_bound;
  if (ext.x) e["x"] = *ext.x;
  if (!e.empty()) doc["extensions"] = e;
  if (!spec.side_events().empty()) {
    json list = json::array();
    for (const auto& cb : spec.side_events()) {
      json item{{"index", cb.index}};
      if (cb.min) item["min"] = *cb.min;
      if (cb.max) item["max"] = *cb.max;
      list.push_back(item);
    }
    doc["side_events"] = list;
  }
  return doc;
}

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace

ProcessSpec load_spec(const std::filesystem::path& path, const Registry& registry) {
  return spec_from_json(read_json(path), registry);
}

std::vector<std::vector<double>> load_anchors(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return doc.get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    throw SchemaError("anchors file must be an array of number arrays");
  }
}

}  // namespace dem
