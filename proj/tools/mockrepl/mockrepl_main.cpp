/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/

// Drop-in REPL stand-in for environments without a Lean toolchain. Speaks the
// community REPL wire protocol: one JSON object per line on stdin, of the form
// {"cmd": <source>, "env": <id>}, answered by one JSON object per line with
// "env", "messages" and "sorries" fields. Checks the mini-Lean fragment
// described in minilean.hpp.

#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minilean.hpp"

using nlohmann::json;

int main() {
  std::vector<minilean::Env> envs;
  envs.push_back({});  // env 0: empty base

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json resp;
    try {
      json req = json::parse(line);
      std::string cmd = req.value("cmd", "");
      long env_id = 0;
      bool has_env = req.contains("env") && !req["env"].is_null();
      if (has_env) env_id = req["env"].get<long>();
      if (env_id < 0 || env_id >= static_cast<long>(envs.size())) env_id = 0;

      minilean::CheckOutcome outcome = minilean::check_source(cmd, envs[static_cast<size_t>(env_id)]);

      minilean::Env next = envs[static_cast<size_t>(env_id)];
      for (const auto& [name, stmt] : outcome.declared) {
        next[name] = stmt;
      }
      envs.push_back(std::move(next));
      long new_env = static_cast<long>(envs.size()) - 1;

      json messages = json::array();
      for (const auto& d : outcome.diags) {
        messages.push_back(json{{"severity", d.severity},
                                {"pos", {{"line", d.line}, {"column", d.column}}},
                                {"endPos", nullptr},
                                {"data", d.text}});
      }
      json sorries = json::array();
      for (const auto& s : outcome.sorries) {
        sorries.push_back(json{{"pos", {{"line", s.line}, {"column", s.column}}},
                               {"endPos", {{"line", s.line}, {"column", s.column + 5}}},
                               {"goal", s.goal_pretty}});
      }
      resp = json{{"env", new_env}, {"messages", messages}, {"sorries", sorries}};
    } catch (const std::exception& e) {
      resp = json{{"env", 0},
                  {"messages", json::array({json{{"severity", "error"},
                                                 {"pos", {{"line", 1}, {"column", 0}}},
                                                 {"endPos", nullptr},
                                                 {"data", std::string("repl: ") + e.what()}}})},
                  {"sorries", json::array()}};
    }
    std::cout << resp.dump() << "\n";
    std::cout.flush();
  }
  return 0;
}
