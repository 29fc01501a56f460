/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lemmaforge/proof_model.hpp"
#include "lemmaforge/util.hpp"

namespace lemmaforge {

/// Bridge to a pool of external Lean REPL processes. The wire protocol is
/// newline-delimited JSON over stdin/stdout: request {"cmd": <source>,
/// "env": <id>}; response {"env": <id>, "messages": [...], "sorries": [...]}.
/// Import headers are elaborated once per worker and cached by env id.

enum class OracleMode { Verify, States };

struct OracleRequest {
  std::string source_text;
  OracleMode mode = OracleMode::Verify;
  double timeout_s = 60.0;
  int memory_cap_mb = 0;  // 0 = unlimited
};

enum class Severity { Error, Warning, Info };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;    // 1-based in the submitted source
  int column = 0;  // 0-based
  std::string text;
};

struct ProofState {
  std::vector<std::pair<std::string, std::string>> hypotheses;  // (name, type)
  std::vector<std::string> goals;  // empty only for a terminal state

  bool terminal() const { return goals.empty(); }
};

enum class VerifyStatus { Proved, Failed, Incomplete, Timeout, Crashed };

struct VerificationResult {
  VerifyStatus status = VerifyStatus::Failed;
  std::vector<Diagnostic> messages;
  std::vector<ProofState> sorry_states;  // goal states reported at sorries
  double wall_time_s = 0.0;

  bool proved() const { return status == VerifyStatus::Proved; }
};

const char* to_string(VerifyStatus status);
const char* to_string(Severity severity);

class ToolchainError : public Error {
 public:
  explicit ToolchainError(const std::string& what) : Error(what) {}
};

struct PoolConfig {
  std::string repl_path;          // executable speaking the REPL protocol
  std::string project_root;       // working directory for workers (may be empty)
  int pool_size = 0;              // 0 = logical cores - 1
  double default_timeout_s = 60.0;
  int recycle_after_requests = 200;
  std::string base_imports = "import Mathlib";
};

/// Parses a pretty-printed goal ("h : T\n... ⊢ goal") into a ProofState.
ProofState parse_goal_state(const std::string& pretty);

/// Deterministic digest of the error diagnostics: "line L, col C: message"
/// per error, deduplicated, sorted by (line, column, text), truncated to
/// `byte_budget` with a trailing marker when cut.
std::string summarize_errors(const VerificationResult& result, size_t byte_budget = 4096);

class ReplPool {
 public:
  explicit ReplPool(PoolConfig config);
  ~ReplPool();

  ReplPool(const ReplPool&) = delete;
  ReplPool& operator=(const ReplPool&) = delete;

  /// Submits a verification; blocks until a worker produced a result.
  VerificationResult verify(const OracleRequest& request);

  /// Queues a verification for the pool; safe to call from any thread.
  std::future<VerificationResult> submit(const OracleRequest& request);

  /// One ProofState per body-line boundary: before line 0, after line 0, ...,
  /// after the last line (n+1 entries for n effective lines). Positions the
  /// oracle cannot report come back as nullopt and must be skipped by callers.
  std::vector<std::optional<ProofState>> collect_states(const TheoremScript& script,
                                                        double timeout_s = 0.0);

  const PoolConfig& config() const { return config_; }
  int size() const { return static_cast<int>(workers_.size()); }

  /// Stops accepting work and joins workers. Called by the destructor.
  void shutdown();

 private:
  struct Job {
    OracleRequest request;
    std::promise<VerificationResult> promise;
  };
  class Worker;

  PoolConfig config_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<std::thread> threads_;
  std::deque<Job> queue_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;

  void worker_loop(Worker& worker);
};

}  // namespace lemmaforge
