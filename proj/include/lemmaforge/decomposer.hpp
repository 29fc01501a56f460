/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lemmaforge/proof_model.hpp"
#include "lemmaforge/repl_bridge.hpp"

namespace lemmaforge {

/// Lemma extraction from verified theorem scripts.
///
/// Structured decomposition lifts each top-level intermediate hypothesis into
/// its own lemma and, dually, grants proved prefixes of the hypothesis chain
/// back to the original statement (2k candidates for k intermediate
/// hypotheses). Unstructured decomposition works on per-line proof states:
/// the forward path re-states the proof from line m onward; the backward
/// paths grant a later state change back as a hypothesis, with the pair of
/// lines (or the m-line prefix) as the candidate proof. All candidates are
/// gated through the oracle before they can be exported.

enum class ExtractionRule {
  HypothesisLift,
  CumulativeGrant,
  Forward,
  BackwardPair,
  BackwardPrefix,
};

const char* to_string(ExtractionRule rule);

struct ExtractedLemma {
  std::string id;  // "<theorem>_<rule>_<param>", zero-padded, reproducible
  ExtractionRule rule = ExtractionRule::Forward;
  int param = 0;  // k-index for structured rules, m / pair index otherwise
  std::vector<Binder> binders;
  std::string goal_text;
  std::string statement_text;  // full theorem header (no `:= by` tail)
  std::string proof_text;      // tactic lines, top level at indent 0
  std::string preamble;        // shared import/open header for verification
  bool verified = false;
  bool trivial = false;
  int proof_length = 0;
  std::string source_theorem;
  std::string source_path;

  /// Complete Lean source for this lemma (preamble + statement + proof).
  std::string print() const;
};

struct RuleCounts {
  int candidates = 0;
  int verified = 0;
  int exported = 0;
  int skipped_positions = 0;  // states the oracle could not report, multi-goal
                              // states, or unrenderable contexts
};

struct DecompositionReport {
  std::string source;
  int n = 0;  // effective proof lines
  int k = 0;  // top-level intermediate hypotheses
  std::map<ExtractionRule, RuleCounts> rules;
  int candidates_total = 0;
  int verified_total = 0;
  int exported_total = 0;
  // Theoretical ceilings implied by n and k, printed alongside the counts.
  int structured_bound = 0;    // 2k
  int unstructured_bound = 0;  // 3n - 7 (0 when n < 3)
};

class NoIntermediateHypotheses : public Error {
 public:
  explicit NoIntermediateHypotheses(const std::string& what) : Error(what) {}
};

/// Pure candidate synthesis: exactly 2k candidates, alternating lift/grant
/// ordering is lift 1..k then grant 1..k. Throws NoIntermediateHypotheses
/// when the script has no top-level `have` introductions.
std::vector<ExtractedLemma> decompose_structured(const TheoremScript& script);

using StateList = std::vector<std::optional<ProofState>>;

std::vector<ExtractedLemma> decompose_forward(const TheoremScript& script,
                                              const StateList& states,
                                              RuleCounts* counts = nullptr);
std::vector<ExtractedLemma> decompose_backward_pair(const TheoremScript& script,
                                                    const StateList& states,
                                                    RuleCounts* counts = nullptr);
std::vector<ExtractedLemma> decompose_backward_prefix(const TheoremScript& script,
                                                      const StateList& states,
                                                      RuleCounts* counts = nullptr);

/// Fans candidate verification out over the pool; sets `verified` and
/// `proof_length` on every lemma in place.
void verify_lemmas(ReplPool& pool, std::vector<ExtractedLemma>& lemmas, double timeout_s = 0.0);

/// True iff any single tactic from `tactic_list` closes the lemma's goal
/// within the timeout. A timeout on one trial counts as that tactic failing.
bool filter_trivial(ReplPool& pool, const ExtractedLemma& lemma,
                    const std::vector<std::string>& tactic_list, double timeout_s = 10.0);

/// The automatic solvers a lemma must resist to be considered non-trivial.
const std::vector<std::string>& default_trivial_tactics();

/// Removes lemmas whose whitespace-collapsed, binder-name-canonicalized
/// statement duplicates an earlier one. Stable: keeps first occurrences.
std::vector<ExtractedLemma> dedup(const std::vector<ExtractedLemma>& lemmas);

enum class Strategy { Structured, Unstructured, Both };

struct DecomposeOptions {
  Strategy strategy = Strategy::Both;
  int min_proof_lines = 2;
  bool keep_trivial = false;
  std::vector<std::string> trivial_tactics = default_trivial_tactics();
  double verify_timeout_s = 0.0;   // 0 = pool default
  double trivial_timeout_s = 10.0;
  bool recursive = false;      // re-decompose exported lemmas with long proofs
  int recursive_threshold = 20;
  int recursive_max_depth = 2;
};

struct DecompositionResult {
  std::vector<ExtractedLemma> candidates;  // everything synthesized, flagged
  std::vector<ExtractedLemma> exported;    // verified, non-trivial, deduped
  DecompositionReport report;
};

/// Full pipeline: synthesize, verify, filter, dedup. The input script must
/// already verify; callers are expected to have checked that.
DecompositionResult run_decomposition(ReplPool& pool, const TheoremScript& script,
                                      const DecomposeOptions& options);

}  // namespace lemmaforge
