/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/config.hpp"

#include <cstdlib>
#include <filesystem>

namespace lemmaforge {

namespace {

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                        (v.front() == '\'' && v.back() == '\''))) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

}  // namespace

GlobalConfig parse_config_text(const std::string& text) {
  GlobalConfig config;
  int line_no = 0;
  for (const auto& raw : util::split_lines(text)) {
    ++line_no;
    std::string_view line = util::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(util::trim(line.substr(0, eq)));
    std::string value = unquote(util::trim(line.substr(eq + 1)));
    if (key == "repl_path") config.repl_path = value;
    else if (key == "lean_project") config.lean_project_root = value;
    else if (key == "pool_size") config.pool_size = std::atoi(value.c_str());
    else if (key == "verify_timeout_s") config.verify_timeout_s = std::atof(value.c_str());
    else if (key == "batch_timeout_s") config.batch_timeout_s = std::atof(value.c_str());
    else if (key == "runs_dir") config.runs_dir = value;
    else if (key == "datasets_dir") config.datasets_dir = value;
    else if (key.rfind("model.", 0) == 0) {
      std::string rest = key.substr(6);
      size_t dot = rest.find('.');
      if (dot == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected model.<id>.endpoint or model.<id>.param.<name>");
      }
      std::string model_id = rest.substr(0, dot);
      std::string field = rest.substr(dot + 1);
      if (field == "endpoint") {
        config.models[model_id].endpoint = value;
      } else if (field.rfind("param.", 0) == 0) {
        config.models[model_id].params[field.substr(6)] = value;
      } else {
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown model field '" +
                          field + "'");
      }
    }
    // Unknown plain keys are ignored so configs can carry user notes.
  }
  return config;
}

GlobalConfig load_config(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("LEMMAFORGE_CONFIG")) path = env;
    else if (std::filesystem::exists("lemmaforge.toml")) path = "lemmaforge.toml";
  }
  GlobalConfig config;
  if (!path.empty() && std::filesystem::exists(path)) {
    config = parse_config_text(util::read_file(path));
  }
  if (const char* env = std::getenv("LEMMAFORGE_REPL")) config.repl_path = env;
  if (const char* env = std::getenv("LEMMAFORGE_LEAN_PROJECT")) config.lean_project_root = env;
  if (const char* env = std::getenv("LEMMAFORGE_POOL_SIZE")) config.pool_size = std::atoi(env);
  return config;
}

void GlobalConfig::validate() const {
  if (pool_size < 0) throw ConfigError("pool_size must be >= 1 (or 0 for automatic)");
  if (repl_path.empty()) {
    throw ConfigError(
        "no verification oracle configured; set repl_path in lemmaforge.toml or LEMMAFORGE_REPL");
  }
  if (!std::filesystem::exists(repl_path)) {
    throw ConfigError("repl_path does not exist: " + repl_path);
  }
  if (!lean_project_root.empty() && !std::filesystem::exists(lean_project_root)) {
    throw ConfigError("lean_project does not exist: " + lean_project_root);
  }
}

}  // namespace lemmaforge
