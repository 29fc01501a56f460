/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/

// lemmaforge: decompose Lean tactic proofs into lemma datasets, verify them
// through a pool of REPL workers, evaluate model provers against them, and
// analyze the results.
//
// Exit codes: 0 success, 1 domain failure (e.g. verification failed),
// 2 configuration or environment error.

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lemmaforge/analysis.hpp"
#include "lemmaforge/config.hpp"
#include "lemmaforge/dataset_io.hpp"
#include "lemmaforge/decomposer.hpp"
#include "lemmaforge/eval_harness.hpp"

namespace lf = lemmaforge;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

struct CommonOpts {
  std::string config_path;
  int jobs = 0;
  double timeout = 0.0;
  bool porcelain = false;
};

lf::GlobalConfig effective_config(const CommonOpts& opts) {
  lf::GlobalConfig config = lf::load_config(opts.config_path);
  if (opts.jobs > 0) config.pool_size = opts.jobs;
  if (opts.timeout > 0) config.verify_timeout_s = opts.timeout;
  return config;
}

lf::PoolConfig pool_config_of(const lf::GlobalConfig& config) {
  config.validate();
  lf::PoolConfig pool_config;
  pool_config.repl_path = config.repl_path;
  pool_config.project_root = config.lean_project_root;
  pool_config.pool_size = config.pool_size;
  pool_config.default_timeout_s = config.verify_timeout_s;
  return pool_config;
}

void porcelain_line(const ojson& j) { std::cout << j.dump() << "\n" << std::flush; }

std::string default_theorem_name(const std::string& source) {
  for (const auto& line : lf::util::split_lines(source)) {
    if (line.empty() || line[0] == ' ') continue;
    for (std::string_view kw : {"theorem ", "lemma "}) {
      if (line.compare(0, kw.size(), kw) == 0) {
        std::string_view rest = lf::util::trim(std::string_view(line).substr(kw.size()));
        size_t end = lf::util::ident_end(rest, 0);
        return std::string(rest.substr(0, end));
      }
    }
  }
  return "";
}

lf::Manifest manifest_for(const fs::path& dataset) {
  if (fs::is_directory(dataset)) {
    fs::path manifest_path = dataset / "manifest.jsonl";
    if (fs::exists(manifest_path)) return lf::load_manifest(manifest_path);
    return lf::import_dataset(dataset, {}).manifest;
  }
  return lf::load_manifest(dataset);
}

int cmd_decompose(const CommonOpts& common, const std::string& file, std::string theorem,
                  const std::string& strategy, const std::string& out_dir, bool keep_trivial,
                  int min_proof_lines, bool recursive) {
  lf::GlobalConfig config = effective_config(common);
  lf::ReplPool pool(pool_config_of(config));

  std::string source = lf::util::read_file(file);
  if (theorem.empty()) theorem = default_theorem_name(source);
  if (theorem.empty()) {
    std::cerr << "error: no theorem or lemma declaration found in " << file << "\n";
    return 1;
  }
  lf::TheoremScript script = lf::parse_theorem(source, theorem);
  script.source_path = file;

  lf::OracleRequest check;
  check.source_text = lf::print_theorem(script);
  lf::VerificationResult input_verdict = pool.verify(check);
  if (!input_verdict.proved()) {
    std::cerr << "error: input does not verify (" << lf::to_string(input_verdict.status)
              << ")\n"
              << lf::summarize_errors(input_verdict) << "\n";
    return 1;
  }

  lf::DecomposeOptions options;
  options.strategy = strategy == "structured"   ? lf::Strategy::Structured
                     : strategy == "unstructured" ? lf::Strategy::Unstructured
                                                  : lf::Strategy::Both;
  options.keep_trivial = keep_trivial;
  options.min_proof_lines = min_proof_lines;
  options.recursive = recursive;

  if (options.strategy == lf::Strategy::Both &&
      lf::top_level_have_indices(script).empty()) {
    std::cerr << "note: no top-level intermediate hypotheses; structured pass skipped\n";
  }

  lf::DecompositionResult result = lf::run_decomposition(pool, script, options);
  const lf::DecompositionReport& report = result.report;

  if (common.porcelain) {
    for (const auto& lemma : result.exported) {
      porcelain_line(ojson{{"lemma_id", lemma.id},
                           {"rule", lf::to_string(lemma.rule)},
                           {"proof_length", lemma.proof_length},
                           {"verified", lemma.verified}});
    }
  }

  std::cout << "decomposition of '" << report.source << "': n = " << report.n
            << ", k = " << report.k << "\n";
  std::cout << "bounds: structured 2k = " << report.structured_bound
            << ", unstructured 3n-7 = " << report.unstructured_bound << "\n";
  for (const auto& [rule, rc] : report.rules) {
    std::cout << "  " << lf::to_string(rule) << ": candidates " << rc.candidates << ", verified "
              << rc.verified << ", exported " << rc.exported;
    if (rc.skipped_positions > 0) std::cout << ", skipped positions " << rc.skipped_positions;
    std::cout << "\n";
  }
  std::cout << "total: candidates " << report.candidates_total << ", verified "
            << report.verified_total << ", exported " << report.exported_total << "\n";
  if (report.n > 0 && report.exported_total > 0) {
    std::cout << "yield: n/" << lf::util::fmt_fixed(
                     static_cast<double>(report.n) / report.exported_total, 1)
              << " lemmas per proof line\n";
  }

  fs::path out = out_dir.empty() ? fs::path(config.datasets_dir) / theorem : fs::path(out_dir);
  lf::ExportOptions export_options;
  export_options.dataset_name = theorem;
  lf::Manifest manifest = lf::export_dataset(result.exported, out, export_options);
  std::cout << "exported " << manifest.entries.size() << " lemmas to " << out.string() << "\n";
  return 0;
}

int cmd_audit(const CommonOpts& common, const std::string& dataset) {
  lf::GlobalConfig config = effective_config(common);
  lf::ReplPool pool(pool_config_of(config));
  fs::path dir(dataset);
  lf::Manifest manifest = manifest_for(dir);
  std::vector<lf::AuditIssue> issues = lf::audit_dataset(dir, manifest, &pool);
  for (const auto& issue : issues) {
    std::cerr << issue.lemma_id << ": " << issue.issue << "\n";
  }
  std::cout << "audited " << manifest.entries.size() << " entries, " << issues.size()
            << " issue(s)\n";
  return issues.empty() ? 0 : 1;
}

int cmd_verify(const CommonOpts& common, const std::string& path) {
  lf::GlobalConfig config = effective_config(common);
  lf::ReplPool pool(pool_config_of(config));

  struct Item {
    std::string id;
    std::string source;
  };
  std::vector<Item> items;
  if (fs::is_directory(path)) {
    lf::ImportResult imported = lf::import_dataset(path, {});
    for (const auto& e : imported.manifest.entries) {
      items.push_back({e.lemma_id, lf::util::read_file(fs::path(path) / e.file)});
    }
    for (const auto& f : imported.failures) {
      std::cerr << "warning: " << f.file << ": " << f.reason << "\n";
    }
  } else {
    items.push_back({path, lf::util::read_file(path)});
  }

  std::vector<std::future<lf::VerificationResult>> futures;
  for (const auto& item : items) {
    lf::OracleRequest req;
    req.source_text = item.source;
    req.timeout_s = config.verify_timeout_s;
    futures.push_back(pool.submit(req));
  }
  std::map<std::string, int> counts;
  bool all_proved = true;
  for (size_t i = 0; i < items.size(); ++i) {
    lf::VerificationResult r = futures[i].get();
    counts[lf::to_string(r.status)] += 1;
    if (!r.proved()) all_proved = false;
    if (common.porcelain) {
      porcelain_line(ojson{{"item", items[i].id}, {"status", lf::to_string(r.status)}});
    } else if (!r.proved()) {
      std::cerr << items[i].id << ": " << lf::to_string(r.status) << "\n";
    }
  }
  std::cout << "verified " << items.size() << " item(s):";
  for (const auto& [status, count] : counts) std::cout << " " << status << " " << count;
  std::cout << "\n";
  return all_proved ? 0 : 1;
}

int cmd_evaluate(const CommonOpts& common, const std::string& dataset, const std::string& model,
                 const std::string& endpoint_flag, const std::string& mode_flag, int rounds,
                 int pass_at_k, bool early_stop, const std::string& run_id,
                 const std::string& resume, int in_flight,
                 const std::vector<std::string>& model_params, const std::string& runs_dir_flag) {
  lf::GlobalConfig config = effective_config(common);
  lf::ReplPool pool(pool_config_of(config));

  lf::EvalConfig eval;
  eval.model_id = model;
  eval.max_feedback_rounds = rounds;
  eval.in_flight = in_flight;
  eval.early_stop = early_stop;
  eval.verify_timeout_s = config.verify_timeout_s;
  auto registered = config.models.find(model);
  if (registered != config.models.end()) {
    eval.endpoint = registered->second.endpoint;
    eval.params = registered->second.params;
  }
  if (!endpoint_flag.empty()) eval.endpoint = endpoint_flag;
  if (eval.endpoint.empty() && model == "fake") eval.endpoint = "fake:";
  if (eval.endpoint.empty()) {
    throw lf::ConfigError("no endpoint for model '" + model +
                          "'; add model." + model + ".endpoint to the config or pass --endpoint");
  }
  for (const auto& kv : model_params) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw lf::ConfigError("--model-param expects key=value, got '" + kv + "'");
    }
    eval.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  lf::EvalMode mode = lf::EvalMode::Feedback;
  if (mode_flag == "pass-at-k" || pass_at_k > 0) {
    mode = lf::EvalMode::PassAtK;
    eval.samples_k = pass_at_k > 0 ? pass_at_k : 32;
  }

  lf::Manifest manifest = manifest_for(dataset);
  fs::path dataset_dir = fs::is_directory(dataset) ? fs::path(dataset)
                                                   : fs::path(dataset).parent_path();

  std::string effective_run = !resume.empty() ? resume
                              : !run_id.empty() ? run_id
                                                : "run-" + lf::util::iso8601_now();
  for (auto& c : effective_run) {
    if (c == ':') c = '-';
  }
  fs::path runs_root = runs_dir_flag.empty() ? fs::path(config.runs_dir) : fs::path(runs_dir_flag);
  fs::path run_dir = runs_root / effective_run;

  std::unique_ptr<lf::ModelClient> client = lf::make_model_client(eval);
  std::signal(SIGINT, handle_sigint);
  lf::ProgressFn progress;
  if (common.porcelain) {
    progress = [](const std::string& lemma_id, const lf::EvalOutcome& outcome) {
      porcelain_line(ojson{{"lemma_id", lemma_id},
                           {"solved", outcome.solved},
                           {"rounds", static_cast<int>(outcome.attempt_ids.size())}});
    };
  }
  lf::CampaignSummary summary = lf::run_campaign(manifest, dataset_dir, *client, pool, eval, mode,
                                                 run_dir, progress, &g_interrupted);

  std::cout << "run directory: " << summary.run_dir.string() << "\n";
  for (const auto& [problem, sc] : summary.per_problem) {
    std::cout << "  " << problem << ": " << sc.first << "/" << sc.second << " ("
              << lf::util::fmt_pct(sc.first, sc.second) << ")\n";
  }
  std::cout << "evaluated " << summary.evaluated << ", resumed past " << summary.skipped_resumed
            << ", solved " << summary.solved << "\n";
  if (g_interrupted.load()) {
    std::cout << "interrupted; resume with --resume " << effective_run << "\n";
  }
  return 0;
}

int cmd_analyze(const std::string& run, const std::string& labels,
                const std::string& name_index_path) {
  fs::path run_dir(run);
  if (!labels.empty()) {
    lf::LabelIngestReport report = lf::ingest_manual_labels(labels, run_dir);
    std::cout << "applied " << report.applied << " label row(s)\n";
    for (const auto& [row, reason] : report.rejected) {
      std::cerr << "rejected row " << row << ": " << reason << "\n";
    }
  }
  lf::NameIndex index;
  if (!name_index_path.empty()) index = lf::NameIndex::load(name_index_path);

  // Global audit: no_error must mirror the oracle verdict on every attempt.
  auto labels_map = lf::labels_for_run(run_dir, index);
  int audited = 0, violations = 0;
  std::map<std::string, int> flag_counts;
  for (const auto& attempt : lf::load_attempts(run_dir)) {
    auto it = labels_map.find(attempt.attempt_id);
    if (it == labels_map.end()) continue;
    ++audited;
    bool proved = attempt.status == lf::VerifyStatus::Proved;
    if (it->second.no_error.value != proved) ++violations;
  }
  for (auto& [id, set] : labels_map) {
    if (set.no_error.value) flag_counts["no_error"] += 1;
    if (set.hallucination.value) flag_counts["hallucination"] += 1;
    if (set.wrong_approach.value) flag_counts["wrong_approach"] += 1;
    if (set.wrong_implementation.value) flag_counts["wrong_implementation"] += 1;
    if (set.incomplete.value) flag_counts["incomplete"] += 1;
    if (set.minor_error.value) flag_counts["minor_error"] += 1;
  }
  std::cout << "attempts audited: " << audited << ", label consistency violations: " << violations
            << "\n";
  for (const auto& [flag, count] : flag_counts) {
    std::cout << "  " << flag << ": " << count << "\n";
  }
  return violations == 0 ? 0 : 1;
}

void warn_if_stale(const lf::NameIndex& index, const lf::Manifest& manifest) {
  if (!index.toolchain().empty() && !manifest.lean_version.empty() &&
      index.toolchain() != manifest.lean_version) {
    std::cerr << "warning: name index was built for toolchain '" << index.toolchain()
              << "' but the dataset is pinned to '" << manifest.lean_version
              << "'; hallucination labels may be stale\n";
  }
}

int cmd_report(const std::string& run, const std::string& dataset,
               const std::string& name_index_path) {
  lf::Manifest manifest = manifest_for(dataset);
  lf::NameIndex index;
  if (!name_index_path.empty()) {
    index = lf::NameIndex::load(name_index_path);
    warn_if_stale(index, manifest);
  }
  fs::path report_dir = lf::build_report(run, manifest, index);
  for (const auto& entry : fs::directory_iterator(report_dir)) {
    std::cout << entry.path().string() << "\n";
  }
  return 0;
}

int cmd_debloat(const CommonOpts& common, const std::string& file, std::string theorem,
                bool annotate, const std::string& out_file) {
  lf::GlobalConfig config = effective_config(common);
  lf::ReplPool pool(pool_config_of(config));

  std::string source = lf::util::read_file(file);
  if (theorem.empty()) theorem = default_theorem_name(source);
  lf::TheoremScript script = lf::parse_theorem(source, theorem);

  int base = script.base_indent();
  std::string proof;
  for (const auto& tl : script.body) {
    std::string_view text = lf::util::rtrim(tl.text);
    size_t cut = std::min<size_t>(static_cast<size_t>(base), static_cast<size_t>(tl.indent));
    proof += text.size() >= cut ? std::string(text.substr(cut)) : std::string(text);
    proof += '\n';
  }
  lf::DebloatResult result = lf::debloat(pool, script.statement_text(), proof, script.preamble,
                                         config.verify_timeout_s);
  std::cout << "original length " << result.original_length << ", minimized "
            << result.minimized_length << ", removed " << result.removed_line_indices.size()
            << " line(s)\n";

  std::string body = annotate ? result.annotated_proof() : result.minimized_proof;
  std::string rebuilt = script.preamble + script.statement_text() + " := by\n";
  for (const auto& line : lf::util::split_lines(body)) {
    if (lf::util::trim(line).empty()) continue;
    rebuilt += "  " + line + "\n";
  }
  if (out_file.empty()) {
    std::cout << rebuilt;
  } else {
    lf::util::write_file_atomic(out_file, rebuilt);
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

int cmd_import(const CommonOpts& common, const std::string& dir, bool verify,
               const std::string& glob, bool write_manifest) {
  lf::ImportOptions options;
  options.glob = glob;
  options.verify = verify;
  std::optional<lf::ReplPool> pool;
  lf::GlobalConfig config = effective_config(common);
  if (verify) {
    pool.emplace(pool_config_of(config));
    options.pool = &*pool;
    options.timeout_s = config.batch_timeout_s;
  }
  lf::ImportResult result = lf::import_dataset(dir, options);
  int total = 0;
  for (const auto& [problem, count] : result.per_problem) {
    std::cout << "  " << problem << ": " << count << "\n";
    total += count;
  }
  std::cout << "total: " << total << " lemma(s), " << result.failures.size() << " failure(s)\n";
  for (const auto& f : result.failures) {
    std::cerr << "  " << f.file << ": " << f.reason << "\n";
  }
  if (write_manifest) {
    lf::save_manifest(result.manifest, dir);
    std::cout << "wrote " << (fs::path(dir) / "manifest.jsonl").string() << "\n";
  }
  return result.failures.empty() ? 0 : 1;
}

int cmd_stats(const std::string& dataset) {
  lf::Manifest manifest = manifest_for(dataset);
  std::vector<lf::ProblemStats> stats = lf::dataset_stats(manifest);
  std::cout << "problem         count   mean    max   min    std    lines\n";
  for (const auto& s : stats) {
    std::printf("%-15s %5d %6.1f %6d %5d %6.1f %8ld\n", s.problem.c_str(), s.count, s.mean,
                s.max, s.min, s.stddev, s.total_lines);
  }
  return 0;
}

int cmd_index(const std::string& from, const std::string& toolchain, const std::string& out) {
  std::vector<std::string> names;
  for (const auto& line : lf::util::split_lines(lf::util::read_file(from))) {
    std::string_view t = lf::util::trim(line);
    if (!t.empty() && t[0] != '#') names.emplace_back(t);
  }
  lf::NameIndex index = lf::NameIndex::from_names(std::move(names), toolchain);
  index.save(out);
  std::cout << "wrote " << index.size() << " names to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemmaforge: tactic-proof decomposition, verification, and prover evaluation"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "config file path (default ./lemmaforge.toml)");

  // decompose
  auto* dec = app.add_subcommand("decompose", "extract lemmas from a verified theorem");
  std::string dec_file, dec_theorem, dec_strategy = "both", dec_out;
  bool dec_keep_trivial = false, dec_recursive = false;
  int dec_min_lines = 2;
  dec->add_option("file", dec_file, "Lean source file")->required();
  dec->add_option("--theorem", dec_theorem, "declaration to decompose (default: first)");
  dec->add_option("--strategy", dec_strategy, "structured | unstructured | both")
      ->check(CLI::IsMember({"structured", "unstructured", "both"}));
  dec->add_option("--out", dec_out, "dataset output directory");
  dec->add_flag("--keep-trivial", dec_keep_trivial, "export lemmas a listed solver closes");
  dec->add_option("--min-proof-lines", dec_min_lines, "easiness threshold (default 2)");
  dec->add_flag("--recursive", dec_recursive, "re-decompose long exported lemmas");
  dec->add_option("--jobs", common.jobs, "worker pool size");
  dec->add_option("--timeout", common.timeout, "per-verification timeout (s)");
  dec->add_flag("--porcelain", common.porcelain, "machine-readable progress lines");

  // verify
  auto* ver = app.add_subcommand("verify", "verify a lemma file or dataset directory");
  std::string ver_path;
  ver->add_option("path", ver_path, "file or dataset directory")->required();
  ver->add_option("--jobs", common.jobs, "worker pool size");
  ver->add_option("--timeout", common.timeout, "per-verification timeout (s)");
  ver->add_flag("--porcelain", common.porcelain, "machine-readable progress lines");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "run a model prover over a dataset");
  std::string ev_dataset, ev_model, ev_endpoint, ev_run_id, ev_resume, ev_runs_dir;
  int ev_rounds = 10, ev_pass_at_k = 0, ev_in_flight = 4;
  bool ev_no_early_stop = false;
  std::vector<std::string> ev_params;
  std::string ev_mode = "feedback";
  ev->add_option("dataset", ev_dataset, "dataset directory or manifest.jsonl")->required();
  ev->add_option("--model", ev_model, "model id (from config registry, or 'fake')")->required();
  ev->add_option("--endpoint", ev_endpoint, "chat-completions URL override");
  ev->add_option("--mode", ev_mode, "feedback | pass-at-k (default feedback)")
      ->check(CLI::IsMember({"feedback", "pass-at-k"}));
  ev->add_option("--rounds", ev_rounds, "max feedback rounds (default 10)");
  ev->add_option("--pass-at-k", ev_pass_at_k, "pass@k with k samples (default 32 in that mode)");
  ev->add_flag("--no-early-stop", ev_no_early_stop, "pass@k: keep sampling after a success");
  ev->add_option("--run-id", ev_run_id, "run directory name (default timestamped)");
  ev->add_option("--resume", ev_resume, "resume an existing run id");
  ev->add_option("--runs-dir", ev_runs_dir, "runs root (default from config)");
  ev->add_option("--in-flight", ev_in_flight, "concurrent lemmas (default 4)");
  ev->add_option("--model-param", ev_params, "extra decoding knob key=value")->take_all();
  ev->add_option("--jobs", common.jobs, "worker pool size");
  ev->add_option("--timeout", common.timeout, "per-verification timeout (s)");
  ev->add_flag("--porcelain", common.porcelain, "machine-readable progress lines");

  // analyze
  auto* an = app.add_subcommand("analyze", "label attempts and audit a run");
  std::string an_run, an_labels, an_index;
  an->add_option("run", an_run, "run directory")->required();
  an->add_option("--labels", an_labels, "manual labels file (tsv/csv)");
  an->add_option("--name-index", an_index, "known-identifier index file");

  // report
  auto* rep = app.add_subcommand("report", "emit report tables for a run");
  std::string rep_run, rep_dataset, rep_index;
  rep->add_option("run", rep_run, "run directory")->required();
  rep->add_option("--dataset", rep_dataset, "dataset directory or manifest.jsonl")->required();
  rep->add_option("--name-index", rep_index, "known-identifier index file");

  // debloat
  auto* de = app.add_subcommand("debloat", "remove unnecessary lines from a proof");
  std::string de_file, de_theorem, de_out;
  bool de_annotate = false;
  de->add_option("file", de_file, "Lean source file")->required();
  de->add_option("--theorem", de_theorem, "declaration to debloat (default: first)");
  de->add_flag("--annotate", de_annotate, "comment out removed lines instead of deleting");
  de->add_option("--out", de_out, "output file (default: stdout)");
  de->add_option("--jobs", common.jobs, "worker pool size");
  de->add_option("--timeout", common.timeout, "per-verification timeout (s)");

  // import
  auto* im = app.add_subcommand("import", "scan an external lemma dataset");
  std::string im_dir, im_glob = "*.lean";
  bool im_verify = false, im_write = false;
  im->add_option("dir", im_dir, "dataset root directory")->required();
  im->add_flag("--verify", im_verify, "verify every lemma through the oracle");
  im->add_option("--glob", im_glob, "filename filter (default *.lean)");
  im->add_flag("--write-manifest", im_write, "write the synthesized manifest into the dataset");
  im->add_option("--jobs", common.jobs, "worker pool size");
  im->add_option("--timeout", common.timeout, "per-verification timeout (s)");

  // stats
  auto* st = app.add_subcommand("stats", "per-problem proof-length statistics");
  std::string st_dataset;
  st->add_option("dataset", st_dataset, "dataset directory or manifest.jsonl")->required();

  // audit
  auto* au = app.add_subcommand("audit", "re-check manifest/filesystem coherence");
  std::string au_dataset;
  au->add_option("dataset", au_dataset, "dataset directory")->required();
  au->add_option("--jobs", common.jobs, "worker pool size");
  au->add_option("--timeout", common.timeout, "per-verification timeout (s)");

  // index
  auto* ix = app.add_subcommand("index", "build a known-identifier index from a name dump");
  std::string ix_from, ix_toolchain, ix_out = "name_index.txt";
  ix->add_option("--from", ix_from, "file with one identifier per line")->required();
  ix->add_option("--toolchain", ix_toolchain, "toolchain stamp to record");
  ix->add_option("--out", ix_out, "output index file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dec->parsed()) {
      return cmd_decompose(common, dec_file, dec_theorem, dec_strategy, dec_out,
                           dec_keep_trivial, dec_min_lines, dec_recursive);
    }
    if (ver->parsed()) return cmd_verify(common, ver_path);
    if (ev->parsed()) {
      return cmd_evaluate(common, ev_dataset, ev_model, ev_endpoint, ev_mode, ev_rounds, ev_pass_at_k,
                          !ev_no_early_stop, ev_run_id, ev_resume, ev_in_flight, ev_params,
                          ev_runs_dir);
    }
    if (an->parsed()) return cmd_analyze(an_run, an_labels, an_index);
    if (rep->parsed()) return cmd_report(rep_run, rep_dataset, rep_index);
    if (de->parsed()) return cmd_debloat(common, de_file, de_theorem, de_annotate, de_out);
    if (im->parsed()) return cmd_import(common, im_dir, im_verify, im_glob, im_write);
    if (st->parsed()) return cmd_stats(st_dataset);
    if (au->parsed()) return cmd_audit(common, au_dataset);
    if (ix->parsed()) return cmd_index(ix_from, ix_toolchain, ix_out);
  } catch (const lf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const lf::ToolchainError& e) {
    std::cerr << "toolchain error: " << e.what() << "\n";
    return 2;
  } catch (const lf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
