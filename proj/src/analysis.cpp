/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lemmaforge {

using ojson = nlohmann::ordered_json;

LabelFlag* ErrorLabelSet::flag_by_name(const std::string& name) {
  if (name == "no_error") return &no_error;
  if (name == "hallucination") return &hallucination;
  if (name == "wrong_approach") return &wrong_approach;
  if (name == "wrong_implementation") return &wrong_implementation;
  if (name == "incomplete") return &incomplete;
  if (name == "minor_error") return &minor_error;
  if (name == "nl_correct") return &nl_correct;
  if (name == "nl_lean_match") return &nl_lean_match;
  return nullptr;
}

// ---------------------------------------------------------------------------
// NameIndex
// ---------------------------------------------------------------------------

NameIndex NameIndex::load(const std::filesystem::path& path) {
  NameIndex index;
  for (const auto& raw : util::split_lines(util::read_file(path))) {
    std::string_view line = util::trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view rest = line.substr(1);
      size_t colon = rest.find(':');
      if (colon != std::string_view::npos &&
          util::trim(rest.substr(0, colon)) == "toolchain") {
        index.toolchain_ = std::string(util::trim(rest.substr(colon + 1)));
      }
      continue;
    }
    index.names_.emplace_back(line);
  }
  std::sort(index.names_.begin(), index.names_.end());
  return index;
}

NameIndex NameIndex::from_names(std::vector<std::string> names, std::string toolchain) {
  NameIndex index;
  index.names_ = std::move(names);
  index.toolchain_ = std::move(toolchain);
  std::sort(index.names_.begin(), index.names_.end());
  return index;
}

void NameIndex::save(const std::filesystem::path& path) const {
  std::string out;
  if (!toolchain_.empty()) out += "# toolchain: " + toolchain_ + "\n";
  for (const auto& n : names_) {
    out += n;
    out += '\n';
  }
  util::write_file_atomic(path, out);
}

bool NameIndex::contains(const std::string& name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

// ---------------------------------------------------------------------------
// Auto labeling
// ---------------------------------------------------------------------------

const std::vector<std::string>& minor_error_patterns() {
  // Wrong/missing arguments to an otherwise valid lemma or tactic. Anything
  // not matching stays unlabeled rather than guessed.
  static const std::vector<std::string> patterns = {
      "type mismatch",
      "application type mismatch",
      "function expected",
      "too many arguments",
      "failed to unify",
      "expects one argument",
      "takes arguments",
  };
  return patterns;
}

namespace {

// Pulls the quoted name out of "unknown identifier 'foo'" style diagnostics.
std::vector<std::string> unknown_names(const std::vector<Diagnostic>& diags) {
  std::vector<std::string> out;
  for (const auto& d : diags) {
    if (d.severity != Severity::Error) continue;
    for (std::string_view marker : {"unknown identifier '", "unknown constant '"}) {
      size_t pos = 0;
      while ((pos = d.text.find(marker, pos)) != std::string::npos) {
        size_t start = pos + marker.size();
        size_t end = d.text.find('\'', start);
        if (end == std::string::npos) break;
        out.push_back(d.text.substr(start, end - start));
        pos = end + 1;
      }
    }
  }
  return out;
}

// Names bound inside the proof body itself (have/intro/let/set/obtain).
std::set<std::string> locally_defined_names(const std::string& proof) {
  std::set<std::string> defined;
  for (const auto& line : util::split_lines(proof)) {
    std::string_view t = util::trim(line);
    for (std::string_view kw : {"have ", "intro ", "let ", "set ", "obtain "}) {
      if (t.substr(0, kw.size()) != kw) continue;
      std::string_view rest = util::trim(t.substr(kw.size()));
      size_t pos = 0;
      while (pos < rest.size() && util::is_ident_start_byte(rest, pos)) {
        size_t end = util::ident_end(rest, pos);
        defined.insert(std::string(rest.substr(pos, end - pos)));
        pos = end;
        while (pos < rest.size() && rest[pos] == ' ') ++pos;
        if (pos < rest.size() && (rest[pos] == ':' || rest[pos] == '=')) break;
      }
    }
  }
  return defined;
}

}  // namespace

ErrorLabelSet auto_label(const EvalAttempt& attempt, const NameIndex& index) {
  ErrorLabelSet labels;
  if (attempt.status == VerifyStatus::Proved) {
    labels.no_error.set(true, LabelProvenance::Auto);
    labels.hallucination.set(false, LabelProvenance::Auto);
    labels.incomplete.set(false, LabelProvenance::Auto);
    labels.minor_error.set(false, LabelProvenance::Auto);
    return labels;
  }
  labels.no_error.set(false, LabelProvenance::Auto);

  std::set<std::string> local = attempt.extracted_proof
                                    ? locally_defined_names(*attempt.extracted_proof)
                                    : std::set<std::string>{};
  bool hallucinated = false;
  for (const auto& name : unknown_names(attempt.diagnostics)) {
    if (!index.contains(name) && !local.count(name)) {
      hallucinated = true;
      break;
    }
  }
  labels.hallucination.set(hallucinated, LabelProvenance::Auto);
  labels.incomplete.set(attempt.status == VerifyStatus::Incomplete, LabelProvenance::Auto);

  bool minor = false;
  for (const auto& d : attempt.diagnostics) {
    if (d.severity != Severity::Error) continue;
    for (const auto& pattern : minor_error_patterns()) {
      if (d.text.find(pattern) != std::string::npos) {
        minor = true;
        break;
      }
    }
  }
  labels.minor_error.set(minor, LabelProvenance::Auto);
  // wrong_approach / wrong_implementation stay Unset: they need a human read.
  return labels;
}

// ---------------------------------------------------------------------------
// Manual labels
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) f = std::string(util::trim(f));
  return fields;
}

bool parse_bool(const std::string& s, bool* out) {
  if (s == "1" || s == "true" || s == "yes") { *out = true; return true; }
  if (s == "0" || s == "false" || s == "no") { *out = false; return true; }
  return false;
}

}  // namespace

LabelIngestReport ingest_manual_labels(const std::filesystem::path& labels_file,
                                       const std::filesystem::path& run_dir) {
  LabelIngestReport report;
  std::vector<EvalAttempt> attempts = load_attempts(run_dir);
  std::map<std::string, const EvalAttempt*> by_id;
  for (const auto& a : attempts) by_id[a.attempt_id] = &a;  // last record wins

  std::vector<std::string> lines = util::split_lines(util::read_file(labels_file));
  int row = 0;
  for (const auto& line : lines) {
    ++row;
    std::string_view t = util::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() < 3) {
      report.rejected.emplace_back(row, "expected at least attempt_id, flag, value");
      continue;
    }
    const std::string& attempt_id = fields[0];
    const std::string& flag_name = fields[1];
    if (attempt_id == "attempt_id") continue;  // header row
    bool value = false;
    if (!parse_bool(fields[2], &value)) {
      report.rejected.emplace_back(row, "unparsable value '" + fields[2] + "'");
      continue;
    }
    auto it = by_id.find(attempt_id);
    if (it == by_id.end()) {
      report.rejected.emplace_back(row, "UnknownAttemptId: " + attempt_id);
      continue;
    }
    ErrorLabelSet probe;
    if (probe.flag_by_name(flag_name) == nullptr) {
      report.rejected.emplace_back(row, "unknown flag '" + flag_name + "'");
      continue;
    }
    bool oracle_proved = it->second->status == VerifyStatus::Proved;
    if (flag_name == "no_error" && value != oracle_proved) {
      report.rejected.emplace_back(
          row, "IntegrityError: no_error is owned by the oracle verdict (" +
                   std::string(to_string(it->second->status)) + ")");
      continue;
    }
    // An oracle-proved attempt cannot carry error-type flags; NL review
    // columns remain legal on it.
    static const std::set<std::string> kErrorFlags = {
        "hallucination", "wrong_approach", "wrong_implementation", "incomplete", "minor_error"};
    if (oracle_proved && value && kErrorFlags.count(flag_name)) {
      report.rejected.emplace_back(
          row, "IntegrityError: '" + flag_name + "' conflicts with a proved verdict");
      continue;
    }
    ojson j{{"attempt_id", attempt_id},
            {"flag", flag_name},
            {"value", value},
            {"annotator", fields.size() > 3 ? fields[3] : ""},
            {"note", fields.size() > 4 ? fields[4] : ""}};
    util::append_line(run_dir / "labels.jsonl", j.dump());
    ++report.applied;
  }
  return report;
}

std::map<std::string, ErrorLabelSet> labels_for_run(const std::filesystem::path& run_dir,
                                                    const NameIndex& index) {
  std::map<std::string, ErrorLabelSet> out;
  for (const auto& a : load_attempts(run_dir)) {
    out[a.attempt_id] = auto_label(a, index);  // last record for an id wins
  }
  for (const auto& line : util::read_jsonl_lines(run_dir / "labels.jsonl")) {
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    auto it = out.find(j.value("attempt_id", ""));
    if (it == out.end()) continue;
    LabelFlag* flag = it->second.flag_by_name(j.value("flag", ""));
    if (!flag) continue;
    flag->set(j.value("value", false), LabelProvenance::Manual);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Debloat
// ---------------------------------------------------------------------------

namespace {

struct Unit {
  int first = 0;
  int last = 0;  // inclusive; one line plus its strictly deeper block
};

// Top-down units over the currently-live lines: each non-comment line at the
// shallowest local depth owns the deeper lines after it.
std::vector<Unit> live_units(const std::vector<std::string>& lines,
                             const std::vector<bool>& removed) {
  std::vector<Unit> units;
  int n = static_cast<int>(lines.size());
  for (int i = 0; i < n; ++i) {
    if (removed[static_cast<size_t>(i)]) continue;
    std::string_view t = util::trim(lines[static_cast<size_t>(i)]);
    if (t.empty() || t.substr(0, 2) == "--") continue;
    int indent = util::indent_of(lines[static_cast<size_t>(i)]);
    int last = i;
    for (int j = i + 1; j < n; ++j) {
      if (removed[static_cast<size_t>(j)]) continue;
      std::string_view tj = util::trim(lines[static_cast<size_t>(j)]);
      if (tj.empty() || tj.substr(0, 2) == "--") continue;
      if (util::indent_of(lines[static_cast<size_t>(j)]) <= indent) break;
      last = j;
    }
    units.push_back({i, last});
  }
  return units;
}

std::string render_trial(const std::string& statement, const std::string& preamble,
                         const std::vector<std::string>& lines,
                         const std::vector<bool>& removed) {
  std::string source = preamble + statement + " := by\n";
  bool any = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (removed[i]) continue;
    if (util::trim(lines[i]).empty()) continue;
    source += "  " + lines[i] + "\n";
    any = true;
  }
  if (!any) source += "  skip\n";  // empty tactic blocks do not parse
  return source;
}

}  // namespace

std::string DebloatResult::annotated_proof() const {
  std::vector<std::string> lines = util::split_lines(original_proof);
  std::set<int> removed(removed_line_indices.begin(), removed_line_indices.end());
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (removed.count(static_cast<int>(i))) {
      out += "-- ";
    }
    out += lines[i];
    out += '\n';
  }
  return out;
}

DebloatResult debloat(ReplPool& pool, const std::string& statement_text,
                      const std::string& proof_text, const std::string& preamble,
                      double timeout_s) {
  DebloatResult result;
  result.original_proof = proof_text;
  result.original_length = proof_length_of_text(proof_text);

  std::vector<std::string> lines = util::split_lines(proof_text);
  std::vector<bool> removed(lines.size(), false);
  double timeout = timeout_s > 0 ? timeout_s : pool.config().default_timeout_s;

  for (;;) {
    bool changed = false;
    std::vector<Unit> units = live_units(lines, removed);
    for (auto it = units.rbegin(); it != units.rend(); ++it) {
      // Never try removing everything: the trial would be the empty proof.
      int live = 0;
      for (size_t i = 0; i < lines.size(); ++i) {
        if (!removed[i] && !util::trim(lines[i]).empty() &&
            util::trim(lines[i]).substr(0, 2) != "--")
          ++live;
      }
      int unit_size = 0;
      for (int i = it->first; i <= it->last; ++i) {
        if (!removed[static_cast<size_t>(i)]) ++unit_size;
      }
      if (unit_size >= live) continue;

      std::vector<bool> trial = removed;
      for (int i = it->first; i <= it->last; ++i) trial[static_cast<size_t>(i)] = true;
      OracleRequest req;
      req.source_text = render_trial(statement_text, preamble, lines, trial);
      req.timeout_s = timeout;
      VerificationResult r = pool.verify(req);
      if (r.status == VerifyStatus::Timeout) continue;  // skip this trial
      if (r.proved()) {
        removed = std::move(trial);
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::string minimized;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (removed[i]) {
      result.removed_line_indices.push_back(static_cast<int>(i));
    } else {
      minimized += lines[i];
      minimized += '\n';
    }
  }
  result.minimized_proof = minimized;
  result.minimized_length = proof_length_of_text(minimized);
  return result;
}

// ---------------------------------------------------------------------------
// Length statistics
// ---------------------------------------------------------------------------

std::string LengthBucket::label() const {
  return std::to_string(lower) + "-" + std::to_string(upper);
}

const std::vector<LengthBucket>& canonical_buckets() {
  static const std::vector<LengthBucket> buckets = {
      {1, 2}, {3, 5}, {6, 10}, {11, 15}, {16, 25}, {26, 100}, {101, 298}};
  return buckets;
}

int bucket_index(int length) {
  const auto& buckets = canonical_buckets();
  if (length < buckets.front().lower) return 0;
  for (size_t i = 0; i < buckets.size(); ++i) {
    if (length >= buckets[i].lower && length <= buckets[i].upper) return static_cast<int>(i);
  }
  return static_cast<int>(buckets.size()) - 1;  // longer than the last bound
}

LengthStats length_stats(const std::vector<int>& proof_lengths) {
  if (proof_lengths.empty()) throw EmptyInput("length_stats: no proofs given");
  LengthStats stats;
  stats.histogram.assign(canonical_buckets().size(), 0);
  long sum = 0;
  stats.max = proof_lengths.front();
  stats.min = proof_lengths.front();
  for (int len : proof_lengths) {
    sum += len;
    stats.max = std::max(stats.max, len);
    stats.min = std::min(stats.min, len);
    stats.histogram[static_cast<size_t>(bucket_index(len))] += 1;
  }
  stats.mean = static_cast<double>(sum) / static_cast<double>(proof_lengths.size());
  double acc = 0;
  for (int len : proof_lengths) acc += (len - stats.mean) * (len - stats.mean);
  stats.stddev = std::sqrt(acc / static_cast<double>(proof_lengths.size()));
  return stats;
}

AccuracyByLength accuracy_by_length(const std::vector<EvalOutcome>& outcomes,
                                    const Manifest& manifest) {
  AccuracyByLength result;
  for (const auto& bucket : canonical_buckets()) {
    result.buckets.push_back({bucket, 0, 0});
  }
  std::map<std::string, bool> solved;
  for (const auto& o : outcomes) solved[o.lemma_id] = o.solved;

  for (const auto& entry : manifest.entries) {
    if (entry.proof_length < 1) {
      result.warnings.push_back("missing proof length for '" + entry.lemma_id +
                                "', excluded from the bucketing");
      continue;
    }
    int b = bucket_index(entry.proof_length);
    result.buckets[static_cast<size_t>(b)].total += 1;
    auto it = solved.find(entry.lemma_id);
    if (it != solved.end() && it->second) {
      result.buckets[static_cast<size_t>(b)].solved += 1;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

struct TableWriter {
  std::ostringstream text;
  ojson data = ojson::object();

  void save(const std::filesystem::path& dir, const std::string& name) {
    util::write_file_atomic(dir / (name + ".txt"), text.str());
    util::write_file_atomic(dir / (name + ".json"), data.dump(2) + "\n");
  }
};

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// The attempt that decided each outcome: the solving attempt when solved
// (pass@k without early stop keeps sampling past a success, so the last
// attempt can be a failure), the final attempt otherwise. Duplicate attempt
// ids resolve to the last occurrence.
std::map<std::string, const EvalAttempt*> final_attempts(
    const std::vector<EvalOutcome>& outcomes, const std::vector<EvalAttempt>& attempts) {
  std::map<std::string, const EvalAttempt*> by_id;
  for (const auto& a : attempts) by_id[a.attempt_id] = &a;
  std::map<std::string, const EvalAttempt*> out;
  for (const auto& o : outcomes) {
    if (o.attempt_ids.empty()) continue;
    const EvalAttempt* pick = nullptr;
    if (o.solved) {
      for (const auto& id : o.attempt_ids) {
        auto it = by_id.find(id);
        if (it != by_id.end() && it->second->status == VerifyStatus::Proved) {
          pick = it->second;
          break;
        }
      }
    }
    if (!pick) {
      auto it = by_id.find(o.attempt_ids.back());
      if (it != by_id.end()) pick = it->second;
    }
    if (pick) out[o.lemma_id] = pick;
  }
  return out;
}

}  // namespace

std::filesystem::path build_report(const std::filesystem::path& run_dir, const Manifest& manifest,
                                   const NameIndex& index) {
  std::filesystem::path report_dir = run_dir / "report";
  std::filesystem::create_directories(report_dir);

  std::vector<EvalOutcome> all_outcomes = load_outcomes(run_dir);
  // Last outcome per lemma wins (resume may append a fresh record).
  std::map<std::string, EvalOutcome> outcome_by_lemma;
  for (auto& o : all_outcomes) outcome_by_lemma[o.lemma_id] = o;
  std::vector<EvalOutcome> outcomes;
  outcomes.reserve(outcome_by_lemma.size());
  for (auto& [id, o] : outcome_by_lemma) outcomes.push_back(o);

  std::vector<EvalAttempt> attempts = load_attempts(run_dir);
  std::string model_id = "model";
  for (const auto& o : outcomes) {
    if (!o.model_id.empty()) {
      model_id = o.model_id;
      break;
    }
  }

  int max_rounds = 10;
  {
    std::filesystem::path config_path = run_dir / "config.json";
    if (std::filesystem::exists(config_path)) {
      ojson config = ojson::parse(util::read_file(config_path), nullptr, false);
      if (!config.is_discarded()) {
        max_rounds = config.value("max_feedback_rounds", 10);
        if (config.contains("model_id")) model_id = config["model_id"].get<std::string>();
      }
    }
  }

  std::map<std::string, const ManifestEntry*> entry_by_id;
  for (const auto& e : manifest.entries) entry_by_id[e.lemma_id] = &e;
  auto problem_of = [&](const std::string& lemma_id) -> std::string {
    auto it = entry_by_id.find(lemma_id);
    return it == entry_by_id.end() ? std::string("unknown") : it->second->source_problem;
  };

  // Problems covered by the manifest (non-trivial entries are the campaign's
  // denominator), in sorted order for determinism.
  std::map<std::string, int> totals;
  for (const auto& e : manifest.entries) {
    if (!e.trivial) totals[e.source_problem] += 1;
  }

  // -- accuracy by problem ---------------------------------------------------
  {
    TableWriter t;
    t.text << pad("problem", 14) << pad("# lemmas", 10) << model_id << "\n";
    ojson rows = ojson::array();
    int total_solved = 0, total_count = 0;
    std::map<std::string, int> solved_by_problem;
    for (const auto& o : outcomes) {
      if (o.solved) solved_by_problem[problem_of(o.lemma_id)] += 1;
    }
    for (const auto& [problem, count] : totals) {
      int solved = solved_by_problem.count(problem) ? solved_by_problem.at(problem) : 0;
      t.text << pad(problem, 14) << pad(std::to_string(count), 10) << solved << " ("
             << util::fmt_pct(solved, count) << ")\n";
      rows.push_back(ojson{{"problem", problem},
                           {"lemmas", count},
                           {"solved", solved},
                           {"accuracy", count == 0 ? 0.0 : 100.0 * solved / count}});
      total_solved += solved;
      total_count += count;
    }
    t.text << pad("total", 14) << pad(std::to_string(total_count), 10) << total_solved << " ("
           << util::fmt_pct(total_solved, total_count) << ")\n";
    t.data = ojson{{"model", model_id},
                   {"rows", rows},
                   {"total", ojson{{"lemmas", total_count},
                                   {"solved", total_solved},
                                   {"accuracy",
                                    total_count == 0 ? 0.0 : 100.0 * total_solved / total_count}}}};
    t.save(report_dir, "accuracy_by_problem");
  }

  // -- feedback progression --------------------------------------------------
  {
    std::vector<int> checkpoints = {0, max_rounds / 2, max_rounds};
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    TableWriter t;
    t.text << pad("problem", 14);
    for (int c : checkpoints) t.text << pad("round<=" + std::to_string(c), 12);
    t.text << "\n";
    ojson rows = ojson::array();
    std::map<std::string, std::vector<int>> solved_at;  // problem -> counts per checkpoint
    for (const auto& o : outcomes) {
      if (!o.solved || !o.solved_at_round.has_value()) continue;
      auto& counts = solved_at[problem_of(o.lemma_id)];
      counts.resize(checkpoints.size(), 0);
      for (size_t c = 0; c < checkpoints.size(); ++c) {
        if (*o.solved_at_round <= checkpoints[c]) counts[c] += 1;
      }
    }
    std::vector<long> total_counts(checkpoints.size(), 0);
    long total_lemmas = 0;
    for (const auto& [problem, count] : totals) {
      t.text << pad(problem, 14);
      ojson row{{"problem", problem}, {"lemmas", count}};
      ojson pcts = ojson::array();
      for (size_t c = 0; c < checkpoints.size(); ++c) {
        int solved = 0;
        auto it = solved_at.find(problem);
        if (it != solved_at.end() && c < it->second.size()) solved = it->second[c];
        t.text << pad(util::fmt_pct(solved, count), 12);
        pcts.push_back(count == 0 ? 0.0 : 100.0 * solved / count);
        total_counts[c] += solved;
      }
      row["accuracy_at_checkpoints"] = pcts;
      rows.push_back(row);
      t.text << "\n";
      total_lemmas += count;
    }
    t.text << pad("total", 14);
    ojson total_pcts = ojson::array();
    for (size_t c = 0; c < checkpoints.size(); ++c) {
      t.text << pad(util::fmt_pct(static_cast<double>(total_counts[c]),
                                  static_cast<double>(total_lemmas)),
                    12);
      total_pcts.push_back(total_lemmas == 0 ? 0.0
                                             : 100.0 * static_cast<double>(total_counts[c]) /
                                                   static_cast<double>(total_lemmas));
    }
    t.text << "\n";
    ojson cps = ojson::array();
    for (int c : checkpoints) cps.push_back(c);
    t.data = ojson{{"model", model_id},
                   {"checkpoints", cps},
                   {"rows", rows},
                   {"total_accuracy_at_checkpoints", total_pcts}};
    t.save(report_dir, "feedback_progression");
  }

  // -- error taxonomy ----------------------------------------------------------
  {
    std::map<std::string, ErrorLabelSet> labels = labels_for_run(run_dir, index);
    auto finals = final_attempts(outcomes, attempts);
    const std::vector<std::pair<std::string, LabelFlag ErrorLabelSet::*>> flags = {
        {"no_error", &ErrorLabelSet::no_error},
        {"hallucination", &ErrorLabelSet::hallucination},
        {"wrong_approach", &ErrorLabelSet::wrong_approach},
        {"wrong_implementation", &ErrorLabelSet::wrong_implementation},
        {"incomplete", &ErrorLabelSet::incomplete},
        {"minor_error", &ErrorLabelSet::minor_error},
    };
    int n = 0;
    std::map<std::string, int> counts;
    int any_error = 0;
    for (const auto& [lemma_id, attempt] : finals) {
      auto it = labels.find(attempt->attempt_id);
      if (it == labels.end()) continue;
      ++n;
      bool any = false;
      for (const auto& [name, member] : flags) {
        const LabelFlag& f = it->second.*member;
        if (f.value) {
          counts[name] += 1;
          if (name != "no_error") any = true;
        }
      }
      if (any) ++any_error;
    }
    TableWriter t;
    t.text << pad("label", 24) << pad("proofs", 10) << "share\n";
    ojson rows = ojson::array();
    for (const auto& [name, member] : flags) {
      int c = counts.count(name) ? counts.at(name) : 0;
      t.text << pad(name, 24) << pad(std::to_string(c), 10) << util::fmt_pct(c, n) << "\n";
      rows.push_back(ojson{{"label", name},
                           {"proofs", c},
                           {"share_of_final_attempts", n == 0 ? 0.0 : 100.0 * c / n}});
    }
    t.text << pad("any_error", 24) << pad(std::to_string(any_error), 10)
           << util::fmt_pct(any_error, n) << "\n";
    t.text << "\n"
           << "counted once per proof per label; a proof with several error\n"
           << "types appears under each of them. 'any_error' counts each\n"
           << "failing proof once.\n";
    t.data = ojson{{"model", model_id},
                   {"final_attempts", n},
                   {"rows", rows},
                   {"proofs_with_any_error", any_error}};
    t.save(report_dir, "error_taxonomy");
  }

  // -- accuracy by proof length ------------------------------------------------
  {
    AccuracyByLength acc = accuracy_by_length(outcomes, manifest);
    TableWriter t;
    t.text << pad("range", 12) << pad("# lemmas", 10) << "accuracy\n";
    ojson rows = ojson::array();
    for (const auto& b : acc.buckets) {
      t.text << pad(b.bucket.label(), 12) << pad(std::to_string(b.total), 10)
             << util::fmt_pct(b.solved, b.total) << "\n";
      rows.push_back(ojson{{"range", b.bucket.label()},
                           {"lemmas", b.total},
                           {"solved", b.solved},
                           {"accuracy", b.total == 0 ? 0.0 : 100.0 * b.solved / b.total}});
    }
    for (const auto& w : acc.warnings) t.text << "warning: " << w << "\n";
    t.data = ojson{{"model", model_id}, {"rows", rows}};
    t.save(report_dir, "accuracy_by_length");
  }

  // -- length histogram ----------------------------------------------------------
  {
    std::map<std::string, const EvalAttempt*> by_id;
    for (const auto& a : attempts) by_id[a.attempt_id] = &a;
    std::map<int, int> model_hist;
    for (const auto& o : outcomes) {
      if (!o.solved) continue;
      for (const auto& id : o.attempt_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end() || it->second->status != VerifyStatus::Proved) continue;
        if (!it->second->extracted_proof) continue;
        model_hist[proof_length_of_text(*it->second->extracted_proof)] += 1;
        break;
      }
    }
    std::map<int, int> dataset_hist;
    for (const auto& e : manifest.entries) dataset_hist[e.proof_length] += 1;

    TableWriter t;
    t.text << pad("length", 10) << pad(model_id, 16) << "dataset\n";
    std::set<int> lengths;
    for (const auto& [len, c] : model_hist) lengths.insert(len);
    for (const auto& [len, c] : dataset_hist) lengths.insert(len);
    ojson model_series = ojson::array(), dataset_series = ojson::array();
    for (int len : lengths) {
      int mc = model_hist.count(len) ? model_hist.at(len) : 0;
      int dc = dataset_hist.count(len) ? dataset_hist.at(len) : 0;
      t.text << pad(std::to_string(len), 10) << pad(std::to_string(mc), 16) << dc << "\n";
      model_series.push_back(ojson{{"length", len}, {"count", mc}});
      dataset_series.push_back(ojson{{"length", len}, {"count", dc}});
    }
    t.data = ojson{{"model", model_id},
                   {"model_correct_proofs", model_series},
                   {"dataset_proofs", dataset_series}};
    t.save(report_dir, "length_histogram");
  }

  return report_dir;
}

}  // namespace lemmaforge
