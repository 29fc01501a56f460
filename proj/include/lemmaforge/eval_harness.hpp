/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lemmaforge/dataset_io.hpp"
#include "lemmaforge/repl_bridge.hpp"

namespace lemmaforge {

/// Evaluation of language-model provers against a lemma dataset, with
/// verification-gated feedback rounds and pass@k sampling. Every model call
/// and verdict is persisted before the next round starts; reports are
/// recomputed deterministically from the persisted records.

struct EvalConfig {
  std::string model_id;
  std::string endpoint;  // chat-completions URL, or "fake:" for the test model
  int max_feedback_rounds = 10;
  int samples_k = 1;
  std::map<std::string, std::string> params;  // decoding knobs, forwarded opaquely
  double request_timeout_s = 120.0;
  std::string prompt_template_id = "default";
  bool early_stop = true;  // pass@k: stop sampling after the first success
  int in_flight = 4;       // campaign-level lemma parallelism
  double verify_timeout_s = 0.0;
};

struct LemmaContext {
  std::string lemma_id;
  std::string statement_text;  // header without the `:= by` tail
  std::string preamble;
  std::string reference_proof;  // dataset proof; used only by the fake model
  std::string source_problem;
};

struct EvalAttempt {
  std::string attempt_id;  // "<lemma>#s<sample>r<round>"
  std::string lemma_id;
  std::string model_id;
  int sample_index = 0;
  int round = 0;
  std::string prompt_text;
  std::string raw_response;
  std::optional<std::string> extracted_proof;
  VerifyStatus status = VerifyStatus::Failed;
  std::vector<Diagnostic> diagnostics;
  std::string timestamp;
};

struct EvalOutcome {
  std::string lemma_id;
  std::string model_id;
  bool solved = false;
  std::optional<int> solved_at_round;
  std::optional<int> solved_at_sample;
  std::vector<std::string> attempt_ids;
  std::string error_note;  // endpoint failures and similar
};

class UnknownTemplate : public Error {
 public:
  explicit UnknownTemplate(const std::string& what) : Error(what) {}
};

class EndpointError : public Error {
 public:
  explicit EndpointError(const std::string& what) : Error(what) {}
};

struct ModelTurn {
  std::string role;  // "user" | "assistant"
  std::string content;
};

/// Abstract chat-style model endpoint. Implementations must be safe to call
/// from several campaign threads at once.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const LemmaContext& lemma, const std::vector<ModelTurn>& messages,
                               const EvalConfig& config) = 0;
};

/// HTTP chat-completions client; bearer token from LEMMAFORGE_MODEL_KEY.
std::unique_ptr<ModelClient> make_http_client();

/// Deterministic scripted model for tests and offline runs. Behavior comes
/// from EvalConfig.params: solve_at_round / solve_at_sample (-1 = never),
/// wrong_style (unknown_id | sorry | empty), delay_ms.
std::unique_ptr<ModelClient> make_fake_client();

/// Picks the client implementation from the endpoint ("fake:" prefix or HTTP).
std::unique_ptr<ModelClient> make_model_client(const EvalConfig& config);

/// Deterministic prompt for a lemma. Throws UnknownTemplate.
std::string build_prompt(const LemmaContext& lemma, const std::string& template_id);

/// The user turn appended after a failed round: error digest plus retry ask.
std::string build_feedback_message(const std::string& digest);

/// Pulls the candidate tactic proof out of a model response: last fenced code
/// block that restates the theorem or starts with tactic syntax; a restated
/// header is stripped. Absent when no usable block exists.
std::optional<std::string> extract_proof(const std::string& raw_response,
                                         const std::string& theorem_name);

/// Append-only writer for one run directory (attempts.jsonl / outcomes.jsonl).
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path run_dir);
  void append_attempt(const EvalAttempt& attempt);
  void append_outcome(const EvalOutcome& outcome);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

std::vector<EvalAttempt> load_attempts(const std::filesystem::path& run_dir);
std::vector<EvalOutcome> load_outcomes(const std::filesystem::path& run_dir);

/// One lemma, conversational feedback mode: round 0 is zero-shot; each later
/// round re-queries with the previous round's error digest appended. Attempts
/// are persisted through `writer` (when given) before the next round starts.
EvalOutcome run_feedback_loop(const LemmaContext& lemma, ModelClient& client, ReplPool& pool,
                              const EvalConfig& config, RunWriter* writer = nullptr);

/// One lemma, k independent zero-shot samples.
EvalOutcome run_pass_at_k(const LemmaContext& lemma, ModelClient& client, ReplPool& pool,
                          const EvalConfig& config, RunWriter* writer = nullptr);

enum class EvalMode { Feedback, PassAtK };

struct CampaignSummary {
  std::filesystem::path run_dir;
  int evaluated = 0;
  int skipped_resumed = 0;
  int solved = 0;
  std::map<std::string, std::pair<int, int>> per_problem;  // problem -> (solved, total)
};

using ProgressFn = std::function<void(const std::string& lemma_id, const EvalOutcome&)>;

/// Whole-dataset sweep over every non-trivial manifest entry. Resumable:
/// lemmas with persisted outcomes are skipped. Per-lemma failures are
/// recorded and never abort the campaign.
CampaignSummary run_campaign(const Manifest& manifest, const std::filesystem::path& dataset_dir,
                             ModelClient& client, ReplPool& pool, const EvalConfig& config,
                             EvalMode mode, const std::filesystem::path& run_dir,
                             const ProgressFn& progress = {},
                             const std::atomic<bool>* stop = nullptr);

/// Loads the LemmaContext for a manifest entry from its dataset file.
LemmaContext load_lemma_context(const Manifest& manifest, const ManifestEntry& entry,
                                const std::filesystem::path& dataset_dir);

}  // namespace lemmaforge
