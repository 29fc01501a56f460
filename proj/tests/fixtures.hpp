#pragma once

// Shared fixture builders for the test suites. The oracle executable comes
// from LEMMAFORGE_REPL (set by CTest to the bundled mini REPL).

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lemmaforge/proof_model.hpp"
#include "lemmaforge/repl_bridge.hpp"

namespace fixtures {

inline std::string repl_path() {
  const char* env = std::getenv("LEMMAFORGE_REPL");
  return env ? env : "";
}

inline lemmaforge::PoolConfig pool_config(int size = 2, double timeout_s = 20.0) {
  lemmaforge::PoolConfig config;
  config.repl_path = repl_path();
  config.pool_size = size;
  config.default_timeout_s = timeout_s;
  return config;
}

inline const std::string kPreamble = "import Mathlib\n\n";

// Straight-line proof with n lines and no intermediate hypotheses:
//   theorem <name> (x : ℕ) : x ≤ x + 1 → ... → x ≤ x + (n-1) → 0 ≤ x := by
//     intro h1
//     ...
//     intro h(n-1)
//     omega
// Every per-line goal stays variable-dependent, so the single-tactic solvers
// cannot close the extracted lemmas and they survive the triviality filter.
inline std::string chain_source(const std::string& name, int n) {
  std::string goal;
  for (int i = 1; i <= n - 1; ++i) {
    goal += "x ≤ x + " + std::to_string(i) + " → ";
  }
  goal += "0 ≤ x";
  std::string src = kPreamble;
  src += "theorem " + name + " (x : ℕ) : " + goal + " := by\n";
  for (int i = 1; i <= n - 1; ++i) {
    src += "  intro h" + std::to_string(i) + "\n";
  }
  src += "  omega\n";
  return src;
}

// k top-level `have` blocks of 3 lines each (have + 2-line sub-proof) and a
// single closing line: n = 3k + 1.
inline std::string structured_source(const std::string& name, int k) {
  std::string src = kPreamble;
  src += "theorem " + name + " (x : ℕ) (hx : 5 ≤ x) : 5 ≤ x + " +
         std::to_string(k) + " := by\n";
  for (int j = 1; j <= k; ++j) {
    src += "  have h" + std::to_string(j) + " : 5 ≤ x → 5 ≤ x + " +
           std::to_string(j) + " := by\n";
    src += "    intro h\n";
    src += "    omega\n";
  }
  src += "  omega\n";
  return src;
}

// Like structured_source, but the main goal is an implication so cumulative
// grants stay out of reach of the single-tactic solvers: n = 3k + 2.
inline std::string structured_exportable_source(const std::string& name, int k) {
  std::string src = kPreamble;
  src += "theorem " + name + " (x : ℕ) : 5 ≤ x → 5 ≤ x + " +
         std::to_string(k) + " := by\n";
  for (int j = 1; j <= k; ++j) {
    src += "  have h" + std::to_string(j) + " : 5 ≤ x → 5 ≤ x + " +
           std::to_string(j) + " := by\n";
    src += "    intro h\n";
    src += "    omega\n";
  }
  src += "  intro h0\n";
  src += "  omega\n";
  return src;
}

inline lemmaforge::TheoremScript parse_fixture(const std::string& source,
                                               const std::string& name) {
  return lemmaforge::parse_theorem(source, name);
}

// Deterministic pseudo-random straight-line script generator for property
// tests: mixes intro lines and skip lines (skips leave the state unchanged).
inline std::string random_chain_source(const std::string& name, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::string> kinds;
  int intros = 0;
  for (int i = 0; i < n - 1; ++i) {
    if (rng() % 3 == 0) {
      kinds.push_back("skip");
    } else {
      ++intros;
      kinds.push_back("intro g" + std::to_string(intros));
    }
  }
  std::string goal;
  for (int i = 1; i <= intros; ++i) {
    goal += "x ≤ x + " + std::to_string(i) + " → ";
  }
  goal += "0 ≤ x";
  std::string src = kPreamble;
  src += "theorem " + name + " (x : ℕ) : " + goal + " := by\n";
  for (const auto& k : kinds) src += "  " + k + "\n";
  src += "  omega\n";
  return src;
}

}  // namespace fixtures
