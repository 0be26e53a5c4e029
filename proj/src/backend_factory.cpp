#include "cotscope/backend_factory.hpp"

#include <fstream>
#include <map>
#include <mutex>

#include "cotscope/analytic_backend.hpp"
#include "cotscope/composite_backend.hpp"
#include "cotscope/error.hpp"
#include "cotscope/scripted_backend.hpp"

namespace cotscope {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

nlohmann::json load_inline_or_file(const nlohmann::json& v, const std::filesystem::path& base, const char* what) {
  if (v.is_object()) return v;
  if (!v.is_string()) throw ConfigError(std::string("backend option '") + what + "' must be a path or an object");
  const auto path = resolve(base, v.get<std::string>());
  std::ifstream in(path);
  if (!in) throw BackendUnavailableError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

struct Registry {
  std::mutex mu;
  std::map<std::string, BackendFactory> factories;

  Registry() {
    factories["analytic"] = [](const nlohmann::json& spec, const std::filesystem::path& base) {
      return std::make_unique<AnalyticBackend>(
          AnalyticModel::from_json(load_inline_or_file(spec.at("model"), base, "model")));
    };
    factories["scripted"] = [](const nlohmann::json& spec, const std::filesystem::path& base) {
      return std::make_unique<ScriptedBackend>(
          ScriptedTable::from_json(load_inline_or_file(spec.at("table"), base, "table")));
    };
    factories["composite"] = [](const nlohmann::json& spec, const std::filesystem::path& base) {
      std::shared_ptr<const Backend> text = make_backend(spec.at("text"), base);
      std::shared_ptr<const Backend> grad = make_backend(spec.at("gradient"), base);
      return std::make_unique<CompositeBackend>(std::move(text), std::move(grad));
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::unique_ptr<Backend> make_backend(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
  if (!spec.is_object() || !spec.contains("name")) throw ConfigError("backend spec needs a 'name'");
  const auto name = spec.at("name").get<std::string>();
  BackendFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.factories.find(name);
    if (it == r.factories.end()) throw ConfigError("unknown backend '" + name + "'");
    factory = it->second;
  }
  try {
    return factory(spec, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("backend '" + name + "': " + e.what());
  }
}

std::vector<std::filesystem::path> backend_files(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
  std::vector<std::filesystem::path> out;
  if (!spec.is_object()) return out;
  for (const char* key : {"model", "table"}) {
    if (spec.contains(key) && spec.at(key).is_string()) out.push_back(resolve(base_dir, spec.at(key).get<std::string>()));
  }
  for (const char* key : {"text", "gradient"}) {
    if (spec.contains(key)) {
      auto sub = backend_files(spec.at(key), base_dir);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

}  // namespace cotscope
