/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#ifdef LEMMAFORGE_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace lemmaforge {

using ojson = nlohmann::ordered_json;

namespace {

std::string attempt_id_of(const std::string& lemma_id, int sample, int round) {
  return lemma_id + "#s" + std::to_string(sample) + "r" + std::to_string(round);
}

std::string statement_with_sorry(const LemmaContext& lemma) {
  return lemma.statement_text + " := by\n  sorry";
}

}  // namespace

std::string build_prompt(const LemmaContext& lemma, const std::string& template_id) {
  if (template_id != "default") {
    throw UnknownTemplate("unknown prompt template '" + template_id + "'");
  }
  std::string prompt;
  prompt +=
      "You are an expert in the Lean 4 proof assistant and the Mathlib library.\n"
      "Write a formal Lean 4 proof for the theorem below. Think step by step:\n"
      "first explain the theorem in your own words, then explain the approach\n"
      "you plan to take, and then explain the proof itself.\n\n"
      "Here is the formal statement. Replace the `sorry` with a complete\n"
      "tactic proof:\n\n";
  prompt += "```lean\n";
  prompt += statement_with_sorry(lemma);
  prompt += "\n```\n\n";
  prompt +=
      "Finish your reply with exactly one fenced Lean code block containing\n"
      "the complete theorem statement and your proof.\n";
  return prompt;
}

std::string build_feedback_message(const std::string& digest) {
  std::string msg;
  msg +=
      "Your proof did not verify. The Lean compiler reported the following\n"
      "errors:\n\n";
  msg += digest.empty() ? "(no diagnostics were produced)" : digest;
  msg +=
      "\n\nFix the proof. Reply again with exactly one fenced Lean code block\n"
      "containing the complete theorem statement and the corrected proof.\n";
  return msg;
}

std::optional<std::string> extract_proof(const std::string& raw_response,
                                         const std::string& theorem_name) {
  std::vector<std::string> lines = util::split_lines(raw_response);
  std::vector<std::string> blocks;
  std::string current;
  bool in_block = false;
  for (const auto& line : lines) {
    if (util::trim(line).substr(0, 3) == "```") {
      if (in_block) {
        blocks.push_back(current);
        current.clear();
      }
      in_block = !in_block;
      continue;
    }
    if (in_block) {
      current += line;
      current += '\n';
    }
  }

  auto looks_like_tactics = [](const std::string& block) {
    for (const auto& line : util::split_lines(block)) {
      std::string_view t = util::trim(line);
      if (t.empty() || t.substr(0, 2) == "--") continue;
      for (std::string_view kw : {"theorem", "lemma", "example", "import", "open", "namespace",
                                  "def", "section", "end", "variable"}) {
        if (util::starts_with_word(t, kw)) return false;
      }
      return true;  // first real line is a tactic
    }
    return false;
  };

  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    const std::string& block = *it;
    bool restates = block.find(theorem_name) != std::string::npos &&
                    (block.find("theorem") != std::string::npos ||
                     block.find("lemma") != std::string::npos ||
                     block.find("example") != std::string::npos);
    if (restates) {
      // Strip the restated header; the parser also handles preamble lines.
      try {
        TheoremScript script = parse_theorem(block, theorem_name);
        std::vector<const TacticLine*> effective;
        int min_indent = -1;
        for (const auto& tl : script.body) {
          effective.push_back(&tl);
          if (tl.kind != LineKind::CommentOrBlank &&
              (min_indent < 0 || tl.indent < min_indent)) {
            min_indent = tl.indent;
          }
        }
        if (effective.empty()) continue;
        std::string proof;
        for (const auto* tl : effective) {
          std::string_view text = util::rtrim(tl->text);
          size_t cut = std::min<size_t>(static_cast<size_t>(std::max(min_indent, 0)),
                                        static_cast<size_t>(tl->indent));
          proof += text.size() >= cut ? std::string(text.substr(cut)) : std::string(text);
          proof += '\n';
        }
        return proof;
      } catch (const ParseError&) {
        continue;
      }
    }
    if (looks_like_tactics(block)) {
      // Bare tactic script.
      std::string proof;
      int min_indent = -1;
      for (const auto& line : util::split_lines(block)) {
        if (util::trim(line).empty()) continue;
        int ind = util::indent_of(line);
        if (min_indent < 0 || ind < min_indent) min_indent = ind;
      }
      for (const auto& line : util::split_lines(block)) {
        std::string_view text = util::rtrim(line);
        if (text.empty()) continue;
        size_t cut = std::min<size_t>(static_cast<size_t>(std::max(min_indent, 0)),
                                      text.size());
        proof += std::string(text.substr(cut));
        proof += '\n';
      }
      if (!util::trim(proof).empty()) return proof;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Model clients
// ---------------------------------------------------------------------------

namespace {

class HttpModelClient : public ModelClient {
 public:
  std::string complete(const LemmaContext&, const std::vector<ModelTurn>& messages,
                       const EvalConfig& config) override {
    std::string endpoint = config.endpoint;
    size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
      throw EndpointError("malformed endpoint URL: " + endpoint);
    }
    size_t path_pos = endpoint.find('/', scheme + 3);
    std::string base = path_pos == std::string::npos ? endpoint : endpoint.substr(0, path_pos);
    std::string path = path_pos == std::string::npos ? "/v1/chat/completions"
                                                     : endpoint.substr(path_pos);

    ojson body;
    body["model"] = config.model_id;
    ojson msgs = ojson::array();
    for (const auto& m : messages) {
      msgs.push_back(ojson{{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = msgs;
    for (const auto& [key, value] : config.params) {
      // Forward decoding knobs with their natural JSON types when they parse.
      if (value == "true" || value == "false") {
        body[key] = value == "true";
      } else {
        try {
          size_t used = 0;
          double d = std::stod(value, &used);
          if (used == value.size()) {
            if (d == static_cast<long long>(d)) body[key] = static_cast<long long>(d);
            else body[key] = d;
          } else {
            body[key] = value;
          }
        } catch (...) {
          body[key] = value;
        }
      }
    }

    httplib::Headers headers;
    if (const char* key = std::getenv("LEMMAFORGE_MODEL_KEY")) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    httplib::Client client(base);
    client.set_read_timeout(static_cast<time_t>(config.request_timeout_s), 0);
    client.set_connection_timeout(10, 0);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      throw EndpointError("endpoint unreachable: " + base);
    }
    if (res->status < 200 || res->status >= 300) {
      throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                          res->body.substr(0, 200));
    }
    try {
      ojson parsed = ojson::parse(res->body);
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw EndpointError(std::string("malformed completion response: ") + e.what());
    }
  }
};

class FakeModelClient : public ModelClient {
 public:
  std::string complete(const LemmaContext& lemma, const std::vector<ModelTurn>& messages,
                       const EvalConfig& config) override {
    int solve_at_round = param_int(config, "solve_at_round", -1);
    int solve_at_sample = param_int(config, "solve_at_sample", -1);
    int delay_ms = param_int(config, "delay_ms", 0);
    std::string wrong_style = param_str(config, "wrong_style", "unknown_id");
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));

    // Rounds are counted from the conversation shape: one user turn means
    // round 0, each feedback round adds an (assistant, user) pair.
    int round = static_cast<int>((messages.size() - 1) / 2);
    int sample = current_sample(config, lemma, messages);

    bool solve = false;
    if (solve_at_round >= 0 && round >= solve_at_round) solve = true;
    if (solve_at_sample >= 0 && sample == solve_at_sample) solve = true;
    // "schedule" pins per-lemma solve rounds: "idA:0,idB:3"; "solve_ids"
    // lists lemmas solved immediately; both override the global knobs.
    std::string schedule = param_str(config, "schedule", "");
    if (!schedule.empty()) {
      solve = false;
      for (const auto& part : split_csv(schedule)) {
        size_t colon = part.rfind(':');
        if (colon == std::string::npos) continue;
        if (part.substr(0, colon) == lemma.lemma_id &&
            round >= std::atoi(part.c_str() + colon + 1)) {
          solve = true;
        }
      }
    }
    std::string solve_ids = param_str(config, "solve_ids", "");
    if (!solve_ids.empty()) {
      for (const auto& id : split_csv(solve_ids)) {
        if (id == lemma.lemma_id) solve = true;
      }
    }

    std::string reply = "The theorem asks us to verify a simple fact. I will follow the\n"
                        "requested structure: theorem, approach, proof.\n\n";
    if (solve && !lemma.reference_proof.empty()) {
      reply += "```lean\n" + lemma.statement_text + " := by\n";
      for (const auto& line : util::split_lines(lemma.reference_proof)) {
        if (util::trim(line).empty()) continue;
        reply += "  " + line + "\n";
      }
      reply += "```\n";
      return reply;
    }
    if (wrong_style == "empty") {
      reply += "I am not sure how to prove this yet.\n";
      return reply;
    }
    if (wrong_style == "sorry") {
      reply += "```lean\n" + lemma.statement_text + " := by\n  sorry\n```\n";
      return reply;
    }
    reply += "```lean\n" + lemma.statement_text + " := by\n  exact nonexistent_helper_lemma_r" +
             std::to_string(round) + "\n```\n";
    return reply;
  }

 private:
  static std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
      size_t comma = s.find(',', start);
      if (comma == std::string::npos) {
        out.push_back(s.substr(start));
        break;
      }
      out.push_back(s.substr(start, comma - start));
      start = comma + 1;
    }
    return out;
  }

  static int param_int(const EvalConfig& config, const std::string& key, int fallback) {
    auto it = config.params.find(key);
    if (it == config.params.end()) return fallback;
    return std::atoi(it->second.c_str());
  }
  static std::string param_str(const EvalConfig& config, const std::string& key,
                               const std::string& fallback) {
    auto it = config.params.find(key);
    return it == config.params.end() ? fallback : it->second;
  }

  // pass@k issues independent single-turn conversations; the harness tags the
  // sample index into the prompt's trailing marker line for determinism.
  static int current_sample(const EvalConfig&, const LemmaContext&,
                            const std::vector<ModelTurn>& messages) {
    const std::string marker = "<!-- sample:";
    if (messages.empty()) return 0;
    const std::string& prompt = messages.front().content;
    size_t pos = prompt.rfind(marker);
    if (pos == std::string::npos) return 0;
    return std::atoi(prompt.c_str() + pos + marker.size());
  }
};

}  // namespace

std::unique_ptr<ModelClient> make_http_client() { return std::make_unique<HttpModelClient>(); }
std::unique_ptr<ModelClient> make_fake_client() { return std::make_unique<FakeModelClient>(); }

std::unique_ptr<ModelClient> make_model_client(const EvalConfig& config) {
  if (config.endpoint.rfind("fake:", 0) == 0 || config.model_id == "fake") {
    return make_fake_client();
  }
  return make_http_client();
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

ojson diag_to_json(const Diagnostic& d) {
  return ojson{{"severity", to_string(d.severity)},
               {"line", d.line},
               {"column", d.column},
               {"text", d.text}};
}

Diagnostic diag_from_json(const ojson& j) {
  Diagnostic d;
  std::string sev = j.value("severity", "error");
  d.severity = sev == "error" ? Severity::Error
              : sev == "warning" ? Severity::Warning
                                 : Severity::Info;
  d.line = j.value("line", 1);
  d.column = j.value("column", 0);
  d.text = j.value("text", "");
  return d;
}

VerifyStatus status_from_string(const std::string& s) {
  if (s == "proved") return VerifyStatus::Proved;
  if (s == "incomplete") return VerifyStatus::Incomplete;
  if (s == "timeout") return VerifyStatus::Timeout;
  if (s == "crashed") return VerifyStatus::Crashed;
  return VerifyStatus::Failed;
}

}  // namespace

RunWriter::RunWriter(std::filesystem::path run_dir) : dir_(std::move(run_dir)) {
  std::filesystem::create_directories(dir_);
}

void RunWriter::append_attempt(const EvalAttempt& a) {
  ojson j{{"attempt_id", a.attempt_id},
          {"lemma_id", a.lemma_id},
          {"model_id", a.model_id},
          {"sample_index", a.sample_index},
          {"round", a.round},
          {"prompt_text", a.prompt_text},
          {"raw_response", a.raw_response},
          {"extracted_proof", a.extracted_proof ? ojson(*a.extracted_proof) : ojson(nullptr)},
          {"status", to_string(a.status)},
          {"diagnostics", ojson::array()},
          {"timestamp", a.timestamp}};
  for (const auto& d : a.diagnostics) j["diagnostics"].push_back(diag_to_json(d));
  std::lock_guard<std::mutex> lock(mutex_);
  util::append_line(dir_ / "attempts.jsonl", j.dump());
}

void RunWriter::append_outcome(const EvalOutcome& o) {
  ojson j{{"lemma_id", o.lemma_id},
          {"model_id", o.model_id},
          {"solved", o.solved},
          {"solved_at_round", o.solved_at_round ? ojson(*o.solved_at_round) : ojson(nullptr)},
          {"solved_at_sample", o.solved_at_sample ? ojson(*o.solved_at_sample) : ojson(nullptr)},
          {"attempt_ids", o.attempt_ids},
          {"error_note", o.error_note}};
  std::lock_guard<std::mutex> lock(mutex_);
  util::append_line(dir_ / "outcomes.jsonl", j.dump());
}

std::vector<EvalAttempt> load_attempts(const std::filesystem::path& run_dir) {
  std::vector<EvalAttempt> out;
  for (const auto& line : util::read_jsonl_lines(run_dir / "attempts.jsonl")) {
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    EvalAttempt a;
    a.attempt_id = j.value("attempt_id", "");
    a.lemma_id = j.value("lemma_id", "");
    a.model_id = j.value("model_id", "");
    a.sample_index = j.value("sample_index", 0);
    a.round = j.value("round", 0);
    a.prompt_text = j.value("prompt_text", "");
    a.raw_response = j.value("raw_response", "");
    if (j.contains("extracted_proof") && !j["extracted_proof"].is_null()) {
      a.extracted_proof = j["extracted_proof"].get<std::string>();
    }
    a.status = status_from_string(j.value("status", "failed"));
    if (j.contains("diagnostics")) {
      for (const auto& dj : j["diagnostics"]) a.diagnostics.push_back(diag_from_json(dj));
    }
    a.timestamp = j.value("timestamp", "");
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<EvalOutcome> load_outcomes(const std::filesystem::path& run_dir) {
  std::vector<EvalOutcome> out;
  for (const auto& line : util::read_jsonl_lines(run_dir / "outcomes.jsonl")) {
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    EvalOutcome o;
    o.lemma_id = j.value("lemma_id", "");
    o.model_id = j.value("model_id", "");
    o.solved = j.value("solved", false);
    if (j.contains("solved_at_round") && !j["solved_at_round"].is_null()) {
      o.solved_at_round = j["solved_at_round"].get<int>();
    }
    if (j.contains("solved_at_sample") && !j["solved_at_sample"].is_null()) {
      o.solved_at_sample = j["solved_at_sample"].get<int>();
    }
    if (j.contains("attempt_ids")) {
      for (const auto& id : j["attempt_ids"]) o.attempt_ids.push_back(id.get<std::string>());
    }
    o.error_note = j.value("error_note", "");
    out.push_back(std::move(o));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation loops
// ---------------------------------------------------------------------------

namespace {

std::string complete_with_retry(ModelClient& client, const LemmaContext& lemma,
                                const std::vector<ModelTurn>& messages, const EvalConfig& config) {
  const int kRetries = 3;
  std::string last_error;
  for (int i = 0; i < kRetries; ++i) {
    try {
      return client.complete(lemma, messages, config);
    } catch (const EndpointError& e) {
      last_error = e.what();
      std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << i)));
    }
  }
  throw EndpointError(last_error);
}

VerificationResult verify_candidate(ReplPool& pool, const LemmaContext& lemma,
                                    const std::optional<std::string>& proof,
                                    const EvalConfig& config) {
  if (!proof) {
    VerificationResult r;
    r.status = VerifyStatus::Failed;
    r.messages.push_back({Severity::Error, 1, 0, "no Lean code block found in the response"});
    return r;
  }
  std::string source = lemma.preamble + lemma.statement_text + " := by\n";
  for (const auto& line : util::split_lines(*proof)) {
    if (util::trim(line).empty()) continue;
    source += "  " + line + "\n";
  }
  OracleRequest req;
  req.source_text = source;
  req.timeout_s = config.verify_timeout_s > 0 ? config.verify_timeout_s
                                              : pool.config().default_timeout_s;
  return pool.verify(req);
}

EvalAttempt make_attempt(const LemmaContext& lemma, const EvalConfig& config, int sample,
                         int round, const std::string& prompt, const std::string& response,
                         const std::optional<std::string>& proof, const VerificationResult& r) {
  EvalAttempt a;
  a.attempt_id = attempt_id_of(lemma.lemma_id, sample, round);
  a.lemma_id = lemma.lemma_id;
  a.model_id = config.model_id;
  a.sample_index = sample;
  a.round = round;
  a.prompt_text = prompt;
  a.raw_response = response;
  a.extracted_proof = proof;
  a.status = r.status;
  a.diagnostics = r.messages;
  a.timestamp = util::iso8601_now();
  return a;
}

}  // namespace

EvalOutcome run_feedback_loop(const LemmaContext& lemma, ModelClient& client, ReplPool& pool,
                              const EvalConfig& config, RunWriter* writer) {
  EvalOutcome outcome;
  outcome.lemma_id = lemma.lemma_id;
  outcome.model_id = config.model_id;

  std::vector<ModelTurn> messages{{"user", build_prompt(lemma, config.prompt_template_id)}};
  for (int round = 0; round <= config.max_feedback_rounds; ++round) {
    std::string response;
    try {
      response = complete_with_retry(client, lemma, messages, config);
    } catch (const EndpointError& e) {
      outcome.error_note = e.what();
      break;
    }
    std::optional<std::string> proof = extract_proof(response, lemma.lemma_id);
    VerificationResult verdict = verify_candidate(pool, lemma, proof, config);
    EvalAttempt attempt = make_attempt(lemma, config, 0, round, messages.back().content,
                                       response, proof, verdict);
    if (writer) writer->append_attempt(attempt);
    outcome.attempt_ids.push_back(attempt.attempt_id);

    if (verdict.proved()) {
      outcome.solved = true;
      outcome.solved_at_round = round;
      break;
    }
    if (round < config.max_feedback_rounds) {
      std::string digest = summarize_errors(verdict);
      messages.push_back({"assistant", response});
      messages.push_back({"user", build_feedback_message(digest)});
    }
  }
  return outcome;
}

EvalOutcome run_pass_at_k(const LemmaContext& lemma, ModelClient& client, ReplPool& pool,
                          const EvalConfig& config, RunWriter* writer) {
  EvalOutcome outcome;
  outcome.lemma_id = lemma.lemma_id;
  outcome.model_id = config.model_id;

  std::string base_prompt = build_prompt(lemma, config.prompt_template_id);
  for (int sample = 0; sample < config.samples_k; ++sample) {
    // The sample marker keeps independent draws distinguishable (and lets the
    // deterministic fake model vary per sample) without changing the task.
    std::string prompt = base_prompt + "\n<!-- sample:" + std::to_string(sample) + " -->\n";
    std::vector<ModelTurn> messages{{"user", prompt}};
    std::string response;
    try {
      response = complete_with_retry(client, lemma, messages, config);
    } catch (const EndpointError& e) {
      outcome.error_note = e.what();
      break;
    }
    std::optional<std::string> proof = extract_proof(response, lemma.lemma_id);
    VerificationResult verdict = verify_candidate(pool, lemma, proof, config);
    EvalAttempt attempt =
        make_attempt(lemma, config, sample, 0, prompt, response, proof, verdict);
    if (writer) writer->append_attempt(attempt);
    outcome.attempt_ids.push_back(attempt.attempt_id);

    if (verdict.proved() && !outcome.solved) {
      outcome.solved = true;
      outcome.solved_at_sample = sample;
      if (config.early_stop) break;
    }
  }
  return outcome;
}

LemmaContext load_lemma_context(const Manifest& manifest, const ManifestEntry& entry,
                                const std::filesystem::path& dataset_dir) {
  (void)manifest;
  LemmaContext ctx;
  ctx.lemma_id = entry.lemma_id;
  ctx.source_problem = entry.source_problem;
  std::string source = util::read_file(dataset_dir / entry.file);
  TheoremScript script = parse_theorem(source, entry.lemma_id);
  ctx.statement_text = script.statement_text();
  ctx.preamble = script.preamble;
  int base = script.base_indent();
  std::string proof;
  for (const auto& tl : script.body) {
    if (tl.kind == LineKind::CommentOrBlank) continue;
    std::string_view text = util::rtrim(tl.text);
    size_t cut = std::min<size_t>(static_cast<size_t>(base), static_cast<size_t>(tl.indent));
    proof += std::string(text.substr(cut));
    proof += '\n';
  }
  ctx.reference_proof = proof;
  return ctx;
}

CampaignSummary run_campaign(const Manifest& manifest, const std::filesystem::path& dataset_dir,
                             ModelClient& client, ReplPool& pool, const EvalConfig& config,
                             EvalMode mode, const std::filesystem::path& run_dir,
                             const ProgressFn& progress, const std::atomic<bool>* stop) {
  CampaignSummary summary;
  summary.run_dir = run_dir;
  RunWriter writer(run_dir);

  // config.json records what was sent; written once per run directory.
  std::filesystem::path config_path = run_dir / "config.json";
  if (!std::filesystem::exists(config_path)) {
    ojson params = ojson::object();
    for (const auto& [k, v] : config.params) params[k] = v;
    ojson j{{"model_id", config.model_id},
            {"endpoint", config.endpoint},
            {"mode", mode == EvalMode::Feedback ? "feedback" : "pass_at_k"},
            {"max_feedback_rounds", config.max_feedback_rounds},
            {"samples_k", config.samples_k},
            {"params", params},
            {"prompt_template_id", config.prompt_template_id},
            {"early_stop", config.early_stop},
            {"dataset_name", manifest.dataset_name}};
    util::write_file_atomic(config_path, j.dump(2) + "\n");
  }

  std::set<std::string> done;
  for (const auto& o : load_outcomes(run_dir)) done.insert(o.lemma_id);

  std::vector<const ManifestEntry*> items;
  for (const auto& e : manifest.entries) {
    if (e.trivial) continue;
    items.push_back(&e);
  }
  std::sort(items.begin(), items.end(), [](const ManifestEntry* a, const ManifestEntry* b) {
    if (a->source_problem != b->source_problem) return a->source_problem < b->source_problem;
    return a->lemma_id < b->lemma_id;
  });
  for (const auto* e : items) {
    summary.per_problem[e->source_problem].second += 1;
  }

  std::mutex summary_mutex;
  std::atomic<size_t> next{0};
  int workers = std::max(1, config.in_flight);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        if (stop && stop->load()) return;  // drain: finish nothing new
        size_t idx = next.fetch_add(1);
        if (idx >= items.size()) return;
        const ManifestEntry& entry = *items[idx];
        if (done.count(entry.lemma_id)) {
          std::lock_guard<std::mutex> lock(summary_mutex);
          ++summary.skipped_resumed;
          continue;
        }
        EvalOutcome outcome;
        try {
          LemmaContext ctx = load_lemma_context(manifest, entry, dataset_dir);
          outcome = mode == EvalMode::Feedback
                        ? run_feedback_loop(ctx, client, pool, config, &writer)
                        : run_pass_at_k(ctx, client, pool, config, &writer);
        } catch (const std::exception& e) {
          outcome.lemma_id = entry.lemma_id;
          outcome.model_id = config.model_id;
          outcome.error_note = e.what();
        }
        writer.append_outcome(outcome);
        {
          std::lock_guard<std::mutex> lock(summary_mutex);
          ++summary.evaluated;
          if (outcome.solved) {
            ++summary.solved;
            summary.per_problem[entry.source_problem].first += 1;
          }
        }
        if (progress) progress(entry.lemma_id, outcome);
      }
    });
  }
  for (auto& t : threads) t.join();

  // Resumed lemmas still count toward the per-problem solved tallies.
  if (!done.empty()) {
    std::lock_guard<std::mutex> lock(summary_mutex);
    std::map<std::string, const ManifestEntry*> by_id;
    for (const auto* e : items) by_id[e->lemma_id] = e;
    for (const auto& o : load_outcomes(run_dir)) {
      if (!done.count(o.lemma_id)) continue;
      if (o.solved) {
        ++summary.solved;
        auto it = by_id.find(o.lemma_id);
        if (it != by_id.end()) summary.per_problem[it->second->source_problem].first += 1;
      }
    }
  }
  return summary;
}

}  // namespace lemmaforge
