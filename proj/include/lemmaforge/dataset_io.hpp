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

#include "lemmaforge/decomposer.hpp"

namespace lemmaforge {

/// On-disk dataset format: one `.lean` file per lemma under
/// `lemmas/<source_problem>/<lemma_id>.lean`, indexed by `manifest.jsonl`
/// (one JSON object per line) plus a `manifest.summary.json` rollup.

struct ManifestEntry {
  std::string lemma_id;
  std::string source_problem;  // e.g. "1997-P5"
  std::string topic;           // free text, may be empty
  std::string file;            // path relative to the dataset root
  int proof_length = 0;
  std::string rule;  // extraction rule name or "imported"
  bool trivial = false;
  bool verified = false;
};

struct Manifest {
  std::string dataset_name;
  std::string lean_version;
  std::string created_at;
  std::string tool_version;
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(const std::string& lemma_id) const;
};

struct ProblemStats {
  std::string problem;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  int max = 0;
  int min = 0;
  long total_lines = 0;
};

struct ImportFailure {
  std::string file;
  std::string reason;
};

struct ImportResult {
  Manifest manifest;
  std::vector<ImportFailure> failures;
  std::map<std::string, int> per_problem;  // counts, including totals source
};

class UnverifiedLemma : public Error {
 public:
  explicit UnverifiedLemma(const std::string& what) : Error(what) {}
};

class EmptyManifest : public Error {
 public:
  explicit EmptyManifest(const std::string& what) : Error(what) {}
};

struct ExportOptions {
  std::string dataset_name = "lemmas";
  std::string lean_version;
  std::string tool_version = "lemmaforge 0.1";
  std::string topic;
  // Problem tag recorded per lemma; defaults to the lemma's source theorem.
  std::string source_problem;
  bool allow_unverified = false;  // refuse unverified lemmas by default
};

/// Writes lemma files and manifests. Deterministic: files and manifest rows
/// are ordered by (source_problem, lemma_id); manifests are written
/// atomically. Throws UnverifiedLemma unless `allow_unverified` is set.
Manifest export_dataset(const std::vector<ExtractedLemma>& lemmas,
                        const std::filesystem::path& out_dir, const ExportOptions& options = {});

struct ImportOptions {
  std::string glob = "*.lean";  // filename filter, `*` wildcard only
  bool verify = false;          // run the oracle over every entry
  ReplPool* pool = nullptr;     // required when verify is set
  double timeout_s = 0.0;
};

/// Scans a dataset directory (recursively) for lemma files; parses each one,
/// computes proof lengths, and synthesizes a manifest if none is present.
/// Parse failures are recorded per file and do not abort the import.
ImportResult import_dataset(const std::filesystem::path& dir, const ImportOptions& options = {});

/// Loads/persists manifest.jsonl (field names are part of the format).
Manifest load_manifest(const std::filesystem::path& manifest_path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& dataset_dir);

/// Per-problem length statistics plus a "total" row keyed "total".
std::vector<ProblemStats> dataset_stats(const Manifest& manifest);

/// Re-checks manifest/filesystem coherence: every entry's file exists and
/// parses; with a pool, also that every verified entry still proves.
struct AuditIssue {
  std::string lemma_id;
  std::string issue;
};
std::vector<AuditIssue> audit_dataset(const std::filesystem::path& dir, const Manifest& manifest,
                                      ReplPool* pool);

/// Derives a "YYYY-Pn" problem tag from a path component when possible.
std::string normalize_problem_tag(const std::string& raw);

}  // namespace lemmaforge
