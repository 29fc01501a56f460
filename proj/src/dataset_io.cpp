/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <regex>

#include <nlohmann/json.hpp>

namespace lemmaforge {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const ManifestEntry* Manifest::find(const std::string& lemma_id) const {
  for (const auto& e : entries) {
    if (e.lemma_id == lemma_id) return &e;
  }
  return nullptr;
}

std::string normalize_problem_tag(const std::string& raw) {
  static const std::regex pattern(R"((\d{4})[-_ ]?[pP](\d+))");
  std::smatch m;
  if (std::regex_search(raw, m, pattern)) {
    return m[1].str() + "-P" + m[2].str();
  }
  return "";
}

namespace {

ojson entry_to_json(const ManifestEntry& e) {
  return ojson{{"lemma_id", e.lemma_id},     {"source_problem", e.source_problem},
               {"topic", e.topic},           {"file", e.file},
               {"proof_length", e.proof_length}, {"rule", e.rule},
               {"trivial", e.trivial},       {"verified", e.verified}};
}

ManifestEntry entry_from_json(const ojson& j) {
  ManifestEntry e;
  e.lemma_id = j.value("lemma_id", "");
  e.source_problem = j.value("source_problem", "");
  e.topic = j.value("topic", "");
  e.file = j.value("file", "");
  e.proof_length = j.value("proof_length", 0);
  e.rule = j.value("rule", "imported");
  e.trivial = j.value("trivial", false);
  e.verified = j.value("verified", false);
  return e;
}

void sort_entries(std::vector<ManifestEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    if (a.source_problem != b.source_problem) return a.source_problem < b.source_problem;
    return a.lemma_id < b.lemma_id;
  });
}

// First theorem/lemma declaration name in a lemma file.
std::string first_decl_name(const std::string& source) {
  for (const auto& line : util::split_lines(source)) {
    if (line.empty() || line[0] == ' ') continue;
    for (std::string_view kw : {"theorem ", "lemma "}) {
      if (line.compare(0, kw.size(), kw) == 0) {
        std::string_view rest = util::trim(std::string_view(line).substr(kw.size()));
        if (rest.empty() || !util::is_ident_start_byte(rest, 0)) break;
        size_t end = util::ident_end(rest, 0);
        return std::string(rest.substr(0, end));
      }
    }
  }
  return "";
}

bool glob_match(const std::string& pattern, const std::string& name) {
  // `*` wildcard only; sufficient for "*.lean"-style filters.
  size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

Manifest export_dataset(const std::vector<ExtractedLemma>& lemmas, const fs::path& out_dir,
                        const ExportOptions& options) {
  for (const auto& lemma : lemmas) {
    if (!lemma.verified && !options.allow_unverified) {
      throw UnverifiedLemma("refusing to export unverified lemma '" + lemma.id + "'");
    }
  }
  Manifest manifest;
  manifest.dataset_name = options.dataset_name;
  manifest.lean_version = options.lean_version;
  manifest.tool_version = options.tool_version;

  for (const auto& lemma : lemmas) {
    ManifestEntry e;
    e.lemma_id = lemma.id;
    e.source_problem = options.source_problem.empty()
                           ? (normalize_problem_tag(lemma.source_theorem).empty()
                                  ? lemma.source_theorem
                                  : normalize_problem_tag(lemma.source_theorem))
                           : options.source_problem;
    e.topic = options.topic;
    e.file = "lemmas/" + e.source_problem + "/" + lemma.id + ".lean";
    e.proof_length = lemma.proof_length;
    e.rule = to_string(lemma.rule);
    e.trivial = lemma.trivial;
    e.verified = lemma.verified;
    manifest.entries.push_back(std::move(e));
  }
  sort_entries(manifest.entries);

  std::map<std::string, const ExtractedLemma*> by_id;
  for (const auto& lemma : lemmas) by_id[lemma.id] = &lemma;
  for (const auto& e : manifest.entries) {
    util::write_file_atomic(out_dir / e.file, by_id.at(e.lemma_id)->print());
  }
  save_manifest(manifest, out_dir);
  return manifest;
}

void save_manifest(const Manifest& manifest, const fs::path& dataset_dir) {
  std::string jsonl;
  for (const auto& e : manifest.entries) {
    jsonl += entry_to_json(e).dump();
    jsonl += '\n';
  }
  util::write_file_atomic(dataset_dir / "manifest.jsonl", jsonl);

  ojson per_problem = ojson::object();
  std::map<std::string, std::pair<int, long>> counts;
  for (const auto& e : manifest.entries) {
    counts[e.source_problem].first += 1;
    counts[e.source_problem].second += e.proof_length;
  }
  long total_lines = 0;
  int total_count = 0;
  for (const auto& [problem, c] : counts) {
    per_problem[problem] = ojson{{"lemmas", c.first}, {"proof_lines", c.second}};
    total_count += c.first;
    total_lines += c.second;
  }
  ojson summary{{"dataset_name", manifest.dataset_name},
                {"lean_version", manifest.lean_version},
                {"tool_version", manifest.tool_version},
                {"total_lemmas", total_count},
                {"total_proof_lines", total_lines},
                {"per_problem", per_problem}};
  if (!manifest.created_at.empty()) summary["created_at"] = manifest.created_at;
  util::write_file_atomic(dataset_dir / "manifest.summary.json", summary.dump(2) + "\n");
}

Manifest load_manifest(const fs::path& manifest_path) {
  Manifest manifest;
  for (const auto& line : util::read_jsonl_lines(manifest_path)) {
    manifest.entries.push_back(entry_from_json(ojson::parse(line)));
  }
  fs::path summary_path = manifest_path.parent_path() / "manifest.summary.json";
  if (fs::exists(summary_path)) {
    ojson summary = ojson::parse(util::read_file(summary_path));
    manifest.dataset_name = summary.value("dataset_name", "");
    manifest.lean_version = summary.value("lean_version", "");
    manifest.tool_version = summary.value("tool_version", "");
    manifest.created_at = summary.value("created_at", "");
  }
  return manifest;
}

ImportResult import_dataset(const fs::path& dir, const ImportOptions& options) {
  if (options.verify && options.pool == nullptr) {
    throw Error("import with verify requires an oracle pool");
  }
  ImportResult result;

  // An existing manifest enriches topic/rule metadata but the files are the
  // authoritative source for what the dataset contains.
  std::map<std::string, ManifestEntry> prior;
  fs::path manifest_path = dir / "manifest.jsonl";
  if (fs::exists(manifest_path)) {
    for (auto& e : load_manifest(manifest_path).entries) prior[e.lemma_id] = e;
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (!glob_match(options.glob, entry.path().filename().string())) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Pending {
    ManifestEntry entry;
    std::string source;
  };
  std::vector<Pending> pending;
  for (const auto& file : files) {
    std::string rel = fs::relative(file, dir).generic_string();
    std::string source;
    try {
      source = util::read_file(file);
    } catch (const IoError& e) {
      result.failures.push_back({rel, e.what()});
      continue;
    }
    std::string name = first_decl_name(source);
    if (name.empty()) {
      result.failures.push_back({rel, "no theorem or lemma declaration found"});
      continue;
    }
    TheoremScript script;
    try {
      script = parse_theorem(source, name);
    } catch (const ParseError& e) {
      result.failures.push_back({rel, e.what()});
      continue;
    }
    ManifestEntry entry;
    entry.lemma_id = name;
    entry.file = rel;
    entry.proof_length = proof_length(script.body);
    std::string parent = file.parent_path().filename().string();
    std::string tag = normalize_problem_tag(parent);
    if (tag.empty()) tag = normalize_problem_tag(file.filename().string());
    entry.source_problem = tag.empty() ? (parent.empty() ? "unknown" : parent) : tag;
    entry.rule = "imported";
    auto it = prior.find(name);
    if (it != prior.end()) {
      entry.topic = it->second.topic;
      if (it->second.rule != "imported" && !it->second.rule.empty()) entry.rule = it->second.rule;
      if (!it->second.source_problem.empty()) entry.source_problem = it->second.source_problem;
      entry.verified = it->second.verified;
      entry.trivial = it->second.trivial;
    }
    pending.push_back({std::move(entry), std::move(source)});
  }

  if (options.verify) {
    std::vector<std::future<VerificationResult>> futures;
    for (const auto& p : pending) {
      OracleRequest req;
      req.source_text = p.source;
      req.timeout_s = options.timeout_s > 0 ? options.timeout_s
                                            : options.pool->config().default_timeout_s;
      futures.push_back(options.pool->submit(req));
    }
    for (size_t i = 0; i < pending.size(); ++i) {
      VerificationResult r = futures[i].get();
      pending[i].entry.verified = r.proved();
      if (!r.proved()) {
        result.failures.push_back(
            {pending[i].entry.file, std::string("verification: ") + to_string(r.status)});
      }
    }
  }

  for (auto& p : pending) {
    result.per_problem[p.entry.source_problem] += 1;
    result.manifest.entries.push_back(std::move(p.entry));
  }
  sort_entries(result.manifest.entries);
  result.manifest.dataset_name = dir.filename().string();
  return result;
}

std::vector<ProblemStats> dataset_stats(const Manifest& manifest) {
  if (manifest.entries.empty()) throw EmptyManifest("manifest has no entries");
  std::map<std::string, std::vector<int>> lengths;
  for (const auto& e : manifest.entries) {
    lengths[e.source_problem].push_back(e.proof_length);
  }
  auto compute = [](const std::string& name, const std::vector<int>& v) {
    ProblemStats s;
    s.problem = name;
    s.count = static_cast<int>(v.size());
    long sum = 0;
    s.max = v.front();
    s.min = v.front();
    for (int x : v) {
      sum += x;
      s.max = std::max(s.max, x);
      s.min = std::min(s.min, x);
    }
    s.total_lines = sum;
    s.mean = static_cast<double>(sum) / static_cast<double>(v.size());
    double acc = 0;
    for (int x : v) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(v.size()));  // population
    return s;
  };
  std::vector<ProblemStats> out;
  std::vector<int> all;
  for (const auto& [problem, v] : lengths) {
    out.push_back(compute(problem, v));
    all.insert(all.end(), v.begin(), v.end());
  }
  out.push_back(compute("total", all));
  return out;
}

std::vector<AuditIssue> audit_dataset(const fs::path& dir, const Manifest& manifest,
                                      ReplPool* pool) {
  std::vector<AuditIssue> issues;
  struct Pending {
    std::string lemma_id;
    std::future<VerificationResult> fut;
  };
  std::vector<Pending> futures;
  for (const auto& e : manifest.entries) {
    fs::path file = dir / e.file;
    if (!fs::exists(file)) {
      issues.push_back({e.lemma_id, "file missing: " + e.file});
      continue;
    }
    std::string source = util::read_file(file);
    try {
      parse_theorem(source, e.lemma_id);
    } catch (const ParseError& err) {
      issues.push_back({e.lemma_id, std::string("parse: ") + err.what()});
      continue;
    }
    if (pool && e.verified) {
      OracleRequest req;
      req.source_text = source;
      futures.push_back({e.lemma_id, pool->submit(req)});
    }
  }
  for (auto& p : futures) {
    VerificationResult r = p.fut.get();
    if (!r.proved()) {
      issues.push_back({p.lemma_id, std::string("re-verification: ") + to_string(r.status)});
    }
  }
  return issues;
}

}  // namespace lemmaforge
