/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lemmaforge/eval_harness.hpp"

namespace lemmaforge {

/// Failure-mode labeling, proof-length analytics, and proof de-bloating.

enum class LabelProvenance { Unset, Auto, Manual };

struct LabelFlag {
  bool value = false;
  LabelProvenance provenance = LabelProvenance::Unset;

  void set(bool v, LabelProvenance p) {
    value = v;
    provenance = p;
  }
};

struct ErrorLabelSet {
  LabelFlag no_error;
  LabelFlag hallucination;
  LabelFlag wrong_approach;        // never auto-set: needs human judgment
  LabelFlag wrong_implementation;  // never auto-set: needs human judgment
  LabelFlag incomplete;
  LabelFlag minor_error;
  // Natural-language review columns, manual only.
  LabelFlag nl_correct;
  LabelFlag nl_lean_match;

  LabelFlag* flag_by_name(const std::string& name);
};

/// Known-identifier index for hallucination detection: a sorted name list
/// with an optional toolchain stamp ("# toolchain: ..." first line).
class NameIndex {
 public:
  static NameIndex load(const std::filesystem::path& path);
  static NameIndex from_names(std::vector<std::string> names, std::string toolchain = "");
  void save(const std::filesystem::path& path) const;

  bool contains(const std::string& name) const;
  bool empty() const { return names_.empty(); }
  size_t size() const { return names_.size(); }
  const std::string& toolchain() const { return toolchain_; }

 private:
  std::vector<std::string> names_;  // sorted
  std::string toolchain_;
};

/// Diagnostic text patterns treated as auto-detectable minor errors (wrong or
/// missing arguments to an otherwise correct lemma/tactic).
const std::vector<std::string>& minor_error_patterns();

/// Auto-detectable subset of the taxonomy. `no_error` mirrors the oracle
/// verdict; hallucination needs an unknown-identifier diagnostic whose name
/// is neither in the index nor defined inside the proof itself.
ErrorLabelSet auto_label(const EvalAttempt& attempt, const NameIndex& index);

struct LabelIngestReport {
  int applied = 0;
  std::vector<std::pair<int, std::string>> rejected;  // (1-based row, reason)
};

/// Merges a delimiter-separated labels file (columns: attempt_id, flag,
/// value, annotator, note; tab or comma separated) into the run's label
/// history. Manual rows override auto labels except `no_error`, which is
/// owned by the oracle (IntegrityError rows are rejected).
LabelIngestReport ingest_manual_labels(const std::filesystem::path& labels_file,
                                       const std::filesystem::path& run_dir);

/// Auto labels for every attempt plus manual overrides from the run's label
/// history, keyed by attempt id.
std::map<std::string, ErrorLabelSet> labels_for_run(const std::filesystem::path& run_dir,
                                                    const NameIndex& index);

struct DebloatResult {
  std::string original_proof;
  std::string minimized_proof;
  std::vector<int> removed_line_indices;  // 0-based, into the original proof
  int original_length = 0;
  int minimized_length = 0;

  /// Original proof with removed lines commented out rather than deleted.
  std::string annotated_proof() const;
};

/// Greedy reverse-order line/block elimination, repeated to a fixed point.
/// Every accepted removal re-verified through the oracle; a timed-out trial
/// is skipped, never accepted.
DebloatResult debloat(ReplPool& pool, const std::string& statement_text,
                      const std::string& proof_text, const std::string& preamble,
                      double timeout_s = 0.0);

struct LengthBucket {
  int lower = 0;
  int upper = 0;

  std::string label() const;
};

/// 1-2, 3-5, 6-10, 11-15, 16-25, 26-100, 101-298.
const std::vector<LengthBucket>& canonical_buckets();
int bucket_index(int length);

struct LengthStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  int max = 0;
  int min = 0;
  std::vector<int> histogram;  // aligned with canonical_buckets()
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(what) {}
};

LengthStats length_stats(const std::vector<int>& proof_lengths);

struct BucketAccuracy {
  LengthBucket bucket;
  int solved = 0;
  int total = 0;
};

struct AccuracyByLength {
  std::vector<BucketAccuracy> buckets;
  std::vector<std::string> warnings;  // lemmas excluded for missing lengths
};

/// Buckets every manifest entry by its recorded (human-written) proof length
/// and counts solved outcomes per bucket.
AccuracyByLength accuracy_by_length(const std::vector<EvalOutcome>& outcomes,
                                    const Manifest& manifest);

/// Emits the report files (plain-text table + JSON per table) under
/// `<run_dir>/report/`: accuracy by problem, feedback-round progression,
/// error taxonomy, accuracy by proof length, and length histogram series.
/// Byte-deterministic given identical run directories.
std::filesystem::path build_report(const std::filesystem::path& run_dir, const Manifest& manifest,
                                   const NameIndex& index);

}  // namespace lemmaforge
