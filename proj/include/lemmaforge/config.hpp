/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <optional>
#include <string>

#include "lemmaforge/util.hpp"

namespace lemmaforge {

struct ModelEndpointConfig {
  std::string endpoint;
  std::map<std::string, std::string> params;
};

/// Toolchain and path configuration. Sources, in increasing precedence:
/// config file (`lemmaforge.toml` in the working directory unless overridden
/// via LEMMAFORGE_CONFIG), environment variables, command-line flags.
struct GlobalConfig {
  std::string repl_path;           // repl_path / LEMMAFORGE_REPL
  std::string lean_project_root;   // lean_project / LEMMAFORGE_LEAN_PROJECT
  int pool_size = 0;               // 0 = logical cores - 1
  double verify_timeout_s = 60.0;
  double batch_timeout_s = 600.0;  // dataset-scale items with long proofs
  std::string runs_dir = "runs";
  std::string datasets_dir = "datasets";
  std::map<std::string, ModelEndpointConfig> models;  // model.<id>.endpoint = ...

  void validate() const;  // throws ConfigError
};

/// Parses the simple `key = value` format ("#" comments, optional quotes,
/// dotted keys for the model registry).
GlobalConfig parse_config_text(const std::string& text);

/// File (if present) then environment. `config_path` empty means discovery:
/// $LEMMAFORGE_CONFIG, else ./lemmaforge.toml.
GlobalConfig load_config(const std::string& config_path = "");

}  // namespace lemmaforge
