#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <memory>
#include <string>

#include "cotscope/backend.hpp"

namespace cotscope {

using BackendFactory =
    std::function<std::unique_ptr<Backend>(const nlohmann::json& spec, const std::filesystem::path& base_dir)>;

/// Registers an out-of-tree backend under `name`. Later registrations replace
/// earlier ones. Built-in names: analytic, scripted, composite.
void register_backend(const std::string& name, BackendFactory factory);

/// Builds a backend from a config object of the form {"name": ..., ...options}.
///   analytic:  {"model": "file.json"} or {"model": {...inline...}}
///   scripted:  {"table": "file.json"} or {"table": {...inline...}}
///   composite: {"text": <backend spec>, "gradient": <backend spec>}
/// Relative paths resolve against base_dir.
std::unique_ptr<Backend> make_backend(const nlohmann::json& spec, const std::filesystem::path& base_dir = {});

/// Files referenced by a backend spec, for fingerprinting.
std::vector<std::filesystem::path> backend_files(const nlohmann::json& spec, const std::filesystem::path& base_dir = {});

}  // namespace cotscope
