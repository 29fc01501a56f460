/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/decomposer.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>

namespace lemmaforge {

namespace {

std::string pad3(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", v);
  return buf;
}

std::string lemma_id(const std::string& theorem, ExtractionRule rule, int param) {
  return theorem + "_" + to_string(rule) + "_" + pad3(param);
}

// Effective (non-comment) body lines of the script, in order.
std::vector<const TacticLine*> effective_lines(const TheoremScript& script) {
  std::vector<const TacticLine*> out;
  for (const auto& tl : script.body) {
    if (tl.kind != LineKind::CommentOrBlank) out.push_back(&tl);
  }
  return out;
}

// Re-indents a run of body lines so the shallowest sits at column 0.
std::vector<std::string> dedent(const std::vector<const TacticLine*>& lines, int base) {
  std::vector<std::string> out;
  for (const auto* tl : lines) {
    std::string_view text = util::rtrim(tl->text);
    int cut = std::min(tl->indent, base);
    out.emplace_back(text.substr(static_cast<size_t>(cut)));
  }
  return out;
}

std::string join(const std::vector<std::string>& lines) { return util::join_lines(lines); }

// A top-level have introduction together with its indented sub-proof block.
struct HaveBlock {
  int have_index = 0;           // body index of the have line
  int first = 0, last = 0;      // inclusive body index range of the block
  std::string hyp_name;
  std::string hyp_type;
  std::vector<std::string> sub_proof;  // dedented proof of the hypothesis
};

std::vector<HaveBlock> find_have_blocks(const TheoremScript& script) {
  std::vector<HaveBlock> blocks;
  int base = script.base_indent();
  const auto& body = script.body;
  for (size_t i = 0; i < body.size(); ++i) {
    const TacticLine& tl = body[i];
    if (tl.kind != LineKind::HaveIntro || tl.indent != base) continue;
    HaveBlock blk;
    blk.have_index = tl.index;
    blk.first = tl.index;
    blk.hyp_name = tl.introduced->hyp_name;
    blk.hyp_type = tl.introduced->hyp_type_text;
    size_t j = i + 1;
    while (j < body.size() &&
           (body[j].kind == LineKind::CommentOrBlank || body[j].indent > base)) {
      ++j;
    }
    // Trailing comments at base indent belong to the next block, so back off
    // over any blank/comment tail.
    size_t end = j;
    while (end > i + 1 && body[end - 1].kind == LineKind::CommentOrBlank) --end;
    blk.last = body[end - 1].index;

    // Sub-proof: inline tactic after `:= by`, a term made into `exact`, or
    // the indented block that follows.
    std::string_view line = util::trim(tl.text);
    size_t assign = line.rfind(":=");
    std::string after_assign =
        assign == std::string::npos ? "" : std::string(util::trim(line.substr(assign + 2)));
    if (after_assign == "by" || after_assign.empty()) {
      std::vector<const TacticLine*> inner;
      int min_indent = -1;
      for (size_t k = i + 1; k < end; ++k) {
        if (body[k].kind == LineKind::CommentOrBlank) continue;
        inner.push_back(&body[k]);
        if (min_indent < 0 || body[k].indent < min_indent) min_indent = body[k].indent;
      }
      blk.sub_proof = dedent(inner, min_indent < 0 ? 0 : min_indent);
    } else if (after_assign.compare(0, 3, "by ") == 0) {
      blk.sub_proof.push_back(std::string(util::trim(after_assign.substr(3))));
    } else {
      blk.sub_proof.push_back("exact " + after_assign);
    }
    blocks.push_back(std::move(blk));
    i = end - 1;
  }
  return blocks;
}

// Wraps a type in parens when it has a top-level connective that would
// otherwise grab its neighbors inside a synthesized conjunction/implication.
bool needs_parens(const std::string& type) {
  int depth = 0;
  for (size_t i = 0; i < type.size(); ++i) {
    char c = type[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    if (depth > 0) continue;
    if (type.compare(i, 3, "→") == 0 || type.compare(i, 3, "∧") == 0 ||
        type.compare(i, 3, "∨") == 0 || type.compare(i, 3, "↔") == 0 ||
        type.compare(i, 2, "->") == 0 || c == ',') {
      return true;
    }
  }
  return false;
}

std::string paren_if_needed(const std::string& type) {
  return needs_parens(type) ? "(" + type + ")" : type;
}

// "new hypotheses (conjoined, in order) → goal"; bare goal when no deltas.
std::string granted_type(const std::vector<std::pair<std::string, std::string>>& delta,
                         const std::string& goal) {
  if (delta.empty()) return goal;
  std::string conj;
  for (size_t i = 0; i < delta.size(); ++i) {
    if (i > 0) conj += " ∧ ";
    conj += paren_if_needed(delta[i].second);
  }
  return conj + " → " + paren_if_needed(goal);
}

std::string granted_closer(const std::string& grant_name,
                           const std::vector<std::pair<std::string, std::string>>& delta) {
  if (delta.empty()) return "exact " + grant_name;
  if (delta.size() == 1) return "exact " + grant_name + " " + delta[0].first;
  std::string args = "⟨";
  for (size_t i = 0; i < delta.size(); ++i) {
    if (i > 0) args += ", ";
    args += delta[i].first;
  }
  args += "⟩";
  return "exact " + grant_name + " " + args;
}

bool renderable_name(const std::string& name) {
  return name != "this" && name.find("✗") == std::string::npos &&
         name.find("✝") == std::string::npos;  // inaccessible (✝)
}

bool renderable_type(const std::string& type) {
  return type.find("?m") == std::string::npos && type.find('') == std::string::npos;
}

std::optional<std::vector<Binder>> render_state_binders(const ProofState& state) {
  std::vector<Binder> binders;
  int group = 0;
  for (const auto& [name, type] : state.hypotheses) {
    if (!renderable_name(name) || !renderable_type(type)) return std::nullopt;
    Binder b;
    b.name = name;
    b.type_text = type;
    b.kind = BinderKind::Explicit;
    b.group = group++;
    binders.push_back(std::move(b));
  }
  return binders;
}

std::string fresh_grant_name(const std::vector<Binder>& binders) {
  std::set<std::string> taken;
  for (const auto& b : binders) taken.insert(b.name);
  std::string name = "h_grant";
  while (taken.count(name)) name += "'";
  return name;
}

ExtractedLemma base_lemma(const TheoremScript& script, ExtractionRule rule, int param) {
  ExtractedLemma lemma;
  lemma.rule = rule;
  lemma.param = param;
  lemma.id = lemma_id(script.name, rule, param);
  lemma.preamble = script.preamble;
  lemma.source_theorem = script.name;
  lemma.source_path = script.source_path;
  return lemma;
}

void finish_lemma(ExtractedLemma& lemma, const std::vector<std::string>& proof_lines) {
  TheoremScript synth = make_script(lemma.id, lemma.binders, lemma.goal_text, proof_lines,
                                    lemma.preamble);
  lemma.statement_text = synth.statement_text();
  lemma.proof_text = join(proof_lines);
  lemma.proof_length = proof_length_of_text(lemma.proof_text);
}

// Hypotheses present in `post` but not in `pre`, by name, in order.
std::vector<std::pair<std::string, std::string>> state_delta(const ProofState& pre,
                                                             const ProofState& post) {
  std::set<std::string> pre_names;
  for (const auto& [name, type] : pre.hypotheses) pre_names.insert(name);
  std::vector<std::pair<std::string, std::string>> delta;
  for (const auto& [name, type] : post.hypotheses) {
    if (!pre_names.count(name)) delta.emplace_back(name, type);
  }
  return delta;
}

bool usable_single_goal(const std::optional<ProofState>& state) {
  return state.has_value() && state->goals.size() == 1;
}

void require_state_count(const StateList& states, int n, const char* op) {
  if (static_cast<int>(states.size()) != n + 1) {
    throw Error(std::string(op) + ": expected " + std::to_string(n + 1) +
                " states for " + std::to_string(n) + " proof lines, got " +
                std::to_string(states.size()));
  }
}

}  // namespace

const char* to_string(ExtractionRule rule) {
  switch (rule) {
    case ExtractionRule::HypothesisLift: return "hypothesis_lift";
    case ExtractionRule::CumulativeGrant: return "cumulative_grant";
    case ExtractionRule::Forward: return "forward";
    case ExtractionRule::BackwardPair: return "backward_pair";
    case ExtractionRule::BackwardPrefix: return "backward_prefix";
  }
  return "unknown";
}

std::string ExtractedLemma::print() const {
  std::string out = preamble;
  out += statement_text;
  out += " := by\n";
  for (const auto& line : util::split_lines(proof_text)) {
    if (util::trim(line).empty()) {
      out += '\n';
    } else {
      out += "  ";
      out += line;
      out += '\n';
    }
  }
  return out;
}

std::vector<ExtractedLemma> decompose_structured(const TheoremScript& script) {
  std::vector<HaveBlock> blocks = find_have_blocks(script);
  if (blocks.empty()) {
    throw NoIntermediateHypotheses("'" + script.name +
                                   "' has no top-level intermediate hypotheses");
  }
  int base = script.base_indent();
  std::vector<ExtractedLemma> out;

  // Lift j: the j-th hypothesis becomes the goal; earlier hypotheses are
  // granted; the candidate proof is the hypothesis's own sub-proof.
  for (size_t j = 0; j < blocks.size(); ++j) {
    ExtractedLemma lemma =
        base_lemma(script, ExtractionRule::HypothesisLift, static_cast<int>(j) + 1);
    lemma.binders = script.binders;
    int group = lemma.binders.empty() ? 0 : lemma.binders.back().group + 1;
    for (size_t p = 0; p < j; ++p) {
      lemma.binders.push_back({blocks[p].hyp_name, blocks[p].hyp_type, BinderKind::Explicit,
                               group++});
    }
    lemma.goal_text = blocks[j].hyp_type;
    finish_lemma(lemma, blocks[j].sub_proof);
    out.push_back(std::move(lemma));
  }

  // Grant j: hypotheses 1..j become assumptions of the original statement and
  // their blocks disappear from the proof.
  for (size_t j = 1; j <= blocks.size(); ++j) {
    ExtractedLemma lemma =
        base_lemma(script, ExtractionRule::CumulativeGrant, static_cast<int>(j));
    lemma.binders = script.binders;
    int group = lemma.binders.empty() ? 0 : lemma.binders.back().group + 1;
    for (size_t p = 0; p < j; ++p) {
      lemma.binders.push_back({blocks[p].hyp_name, blocks[p].hyp_type, BinderKind::Explicit,
                               group++});
    }
    lemma.goal_text = script.goal_text;
    std::vector<const TacticLine*> remaining;
    for (const auto& tl : script.body) {
      if (tl.kind == LineKind::CommentOrBlank) continue;
      bool deleted = false;
      for (size_t p = 0; p < j; ++p) {
        if (tl.index >= blocks[p].first && tl.index <= blocks[p].last) {
          deleted = true;
          break;
        }
      }
      if (!deleted) remaining.push_back(&tl);
    }
    finish_lemma(lemma, dedent(remaining, base));
    out.push_back(std::move(lemma));
  }
  return out;
}

std::vector<ExtractedLemma> decompose_forward(const TheoremScript& script,
                                              const StateList& states, RuleCounts* counts) {
  std::vector<ExtractedLemma> out;
  auto lines = effective_lines(script);
  int n = static_cast<int>(lines.size());
  require_state_count(states, n, "decompose_forward");
  int base = script.base_indent();
  for (int m = 1; m <= n - 2; ++m) {
    if (!usable_single_goal(states[static_cast<size_t>(m)])) {
      if (counts) ++counts->skipped_positions;
      continue;
    }
    const ProofState& state = *states[static_cast<size_t>(m)];
    auto binders = render_state_binders(state);
    if (!binders) {
      if (counts) ++counts->skipped_positions;
      continue;
    }
    ExtractedLemma lemma = base_lemma(script, ExtractionRule::Forward, m);
    lemma.binders = std::move(*binders);
    lemma.goal_text = state.goals[0];
    std::vector<const TacticLine*> rest(lines.begin() + m, lines.end());
    finish_lemma(lemma, dedent(rest, base));
    out.push_back(std::move(lemma));
  }
  return out;
}

std::vector<ExtractedLemma> decompose_backward_pair(const TheoremScript& script,
                                                    const StateList& states,
                                                    RuleCounts* counts) {
  std::vector<ExtractedLemma> out;
  auto lines = effective_lines(script);
  int n = static_cast<int>(lines.size());
  require_state_count(states, n, "decompose_backward_pair");
  int base = script.base_indent();
  for (int i = 0; i <= n - 2; ++i) {
    const auto& pre = states[static_cast<size_t>(i)];
    const auto& post = states[static_cast<size_t>(i) + 2];
    if (!usable_single_goal(pre) || !usable_single_goal(post)) {
      if (counts && (!post.has_value() || !post->terminal())) ++counts->skipped_positions;
      continue;
    }
    auto delta = state_delta(*pre, *post);
    auto binders = render_state_binders(*pre);
    bool delta_ok = true;
    for (const auto& [name, type] : delta) {
      if (!renderable_name(name) || !renderable_type(type)) delta_ok = false;
    }
    if (!binders || !delta_ok) {
      if (counts) ++counts->skipped_positions;
      continue;
    }
    ExtractedLemma lemma = base_lemma(script, ExtractionRule::BackwardPair, i);
    lemma.binders = std::move(*binders);
    std::string grant = fresh_grant_name(lemma.binders);
    int group = lemma.binders.empty() ? 0 : lemma.binders.back().group + 1;
    lemma.binders.push_back(
        {grant, granted_type(delta, post->goals[0]), BinderKind::Explicit, group});
    lemma.goal_text = pre->goals[0];
    std::vector<std::string> proof =
        dedent({lines[static_cast<size_t>(i)], lines[static_cast<size_t>(i) + 1]}, base);
    proof.push_back(granted_closer(grant, delta));
    finish_lemma(lemma, proof);
    out.push_back(std::move(lemma));
  }
  return out;
}

std::vector<ExtractedLemma> decompose_backward_prefix(const TheoremScript& script,
                                                      const StateList& states,
                                                      RuleCounts* counts) {
  std::vector<ExtractedLemma> out;
  auto lines = effective_lines(script);
  int n = static_cast<int>(lines.size());
  require_state_count(states, n, "decompose_backward_prefix");
  int base = script.base_indent();
  for (int m = 2; m <= n - 2; ++m) {
    const auto& initial = states[0];
    const auto& mid = states[static_cast<size_t>(m)];
    if (!usable_single_goal(mid) || !initial.has_value()) {
      if (counts) ++counts->skipped_positions;
      continue;
    }
    auto delta = state_delta(*initial, *mid);
    bool delta_ok = true;
    for (const auto& [name, type] : delta) {
      if (!renderable_name(name) || !renderable_type(type)) delta_ok = false;
    }
    if (!delta_ok) {
      if (counts) ++counts->skipped_positions;
      continue;
    }
    ExtractedLemma lemma = base_lemma(script, ExtractionRule::BackwardPrefix, m);
    lemma.binders = script.binders;
    std::string grant = fresh_grant_name(lemma.binders);
    int group = lemma.binders.empty() ? 0 : lemma.binders.back().group + 1;
    lemma.binders.push_back(
        {grant, granted_type(delta, mid->goals[0]), BinderKind::Explicit, group});
    lemma.goal_text = script.goal_text;
    std::vector<const TacticLine*> prefix(lines.begin(), lines.begin() + m);
    std::vector<std::string> proof = dedent(prefix, base);
    proof.push_back(granted_closer(grant, delta));
    finish_lemma(lemma, proof);
    out.push_back(std::move(lemma));
  }
  return out;
}

void verify_lemmas(ReplPool& pool, std::vector<ExtractedLemma>& lemmas, double timeout_s) {
  std::vector<std::future<VerificationResult>> futures;
  futures.reserve(lemmas.size());
  for (const auto& lemma : lemmas) {
    OracleRequest req;
    req.source_text = lemma.print();
    req.timeout_s = timeout_s > 0 ? timeout_s : pool.config().default_timeout_s;
    futures.push_back(pool.submit(req));
  }
  for (size_t i = 0; i < lemmas.size(); ++i) {
    lemmas[i].verified = futures[i].get().proved();
    lemmas[i].proof_length = proof_length_of_text(lemmas[i].proof_text);
  }
}

const std::vector<std::string>& default_trivial_tactics() {
  static const std::vector<std::string> tactics = {
      "hint", "linarith", "exact?", "simp", "omega", "ring", "norm_cast", "norm_num"};
  return tactics;
}

bool filter_trivial(ReplPool& pool, const ExtractedLemma& lemma,
                    const std::vector<std::string>& tactic_list, double timeout_s) {
  if (tactic_list.empty()) return false;
  std::vector<std::future<VerificationResult>> futures;
  for (const auto& tactic : tactic_list) {
    OracleRequest req;
    req.source_text = lemma.preamble + lemma.statement_text + " := by\n  " + tactic + "\n";
    req.timeout_s = timeout_s;
    futures.push_back(pool.submit(req));
  }
  bool trivial = false;
  for (auto& fut : futures) {
    VerificationResult r = fut.get();
    // A timed-out trial proves nothing; only a positive verdict marks trivial.
    if (r.proved()) trivial = true;
  }
  return trivial;
}

std::vector<ExtractedLemma> dedup(const std::vector<ExtractedLemma>& lemmas) {
  std::vector<ExtractedLemma> out;
  std::set<std::string> seen;
  for (const auto& lemma : lemmas) {
    std::vector<std::pair<std::string, std::string>> renames;
    int counter = 0;
    for (const auto& b : lemma.binders) {
      renames.emplace_back(b.name, "b" + std::to_string(counter++));
    }
    std::string key;
    for (const auto& b : lemma.binders) {
      key += b.kind == BinderKind::Explicit ? 'e' : b.kind == BinderKind::Implicit ? 'i' : 'c';
      key += util::collapse_ws(util::rename_identifiers(b.type_text, renames));
      key += ';';
    }
    key += "|";
    key += util::collapse_ws(util::rename_identifiers(lemma.goal_text, renames));
    if (seen.insert(key).second) out.push_back(lemma);
  }
  return out;
}

namespace {

DecompositionResult run_decomposition_depth(ReplPool& pool, const TheoremScript& script,
                                            const DecomposeOptions& options, int depth);

// Optional second-level pass over exported lemmas with long proofs.
void recurse_into(ReplPool& pool, const DecomposeOptions& options, int depth,
                  DecompositionResult& result) {
  if (!options.recursive || depth + 1 >= options.recursive_max_depth) return;
  std::vector<ExtractedLemma> extra;
  for (const auto& lemma : result.exported) {
    if (lemma.proof_length <= options.recursive_threshold) continue;
    TheoremScript sub = make_script(lemma.id, lemma.binders, lemma.goal_text,
                                    util::split_lines(lemma.proof_text), lemma.preamble);
    sub.source_path = lemma.source_path;
    try {
      DecompositionResult nested = run_decomposition_depth(pool, sub, options, depth + 1);
      for (auto& l : nested.exported) {
        l.source_theorem = lemma.source_theorem;
        extra.push_back(std::move(l));
      }
    } catch (const NoIntermediateHypotheses&) {
      // Nothing structured to pull out of this lemma.
    }
  }
  for (auto& l : extra) result.exported.push_back(std::move(l));
  result.exported = dedup(result.exported);
  result.report.exported_total = static_cast<int>(result.exported.size());
}

DecompositionResult run_decomposition_depth(ReplPool& pool, const TheoremScript& script,
                                            const DecomposeOptions& options, int depth) {
  DecompositionResult result;
  DecompositionReport& report = result.report;
  report.source = script.name;
  report.n = proof_length(script.body);
  report.k = static_cast<int>(top_level_have_indices(script).size());
  report.structured_bound = 2 * report.k;
  report.unstructured_bound = report.n >= 3 ? 3 * report.n - 7 : 0;

  bool want_structured =
      options.strategy == Strategy::Structured || options.strategy == Strategy::Both;
  bool want_unstructured =
      options.strategy == Strategy::Unstructured || options.strategy == Strategy::Both;

  if (want_structured) {
    if (report.k == 0 && options.strategy == Strategy::Structured) {
      throw NoIntermediateHypotheses("'" + script.name +
                                     "' has no top-level intermediate hypotheses");
    }
    if (report.k > 0) {
      for (auto& lemma : decompose_structured(script)) {
        result.candidates.push_back(std::move(lemma));
      }
    }
  }
  if (want_unstructured && report.n >= 3) {
    StateList states = pool.collect_states(script, options.verify_timeout_s);
    auto forward = decompose_forward(script, states, &report.rules[ExtractionRule::Forward]);
    auto pairs = decompose_backward_pair(script, states,
                                         &report.rules[ExtractionRule::BackwardPair]);
    auto prefixes = decompose_backward_prefix(script, states,
                                              &report.rules[ExtractionRule::BackwardPrefix]);
    for (auto* batch : {&forward, &pairs, &prefixes}) {
      for (auto& lemma : *batch) result.candidates.push_back(std::move(lemma));
    }
  }

  verify_lemmas(pool, result.candidates, options.verify_timeout_s);

  for (auto& lemma : result.candidates) {
    RuleCounts& rc = report.rules[lemma.rule];
    ++rc.candidates;
    if (lemma.verified) ++rc.verified;
  }

  std::vector<ExtractedLemma> eligible;
  for (auto& lemma : result.candidates) {
    if (!lemma.verified) continue;
    if (lemma.proof_length < options.min_proof_lines) continue;
    lemma.trivial = filter_trivial(pool, lemma, options.trivial_tactics,
                                   options.trivial_timeout_s);
    if (lemma.trivial && !options.keep_trivial) continue;
    eligible.push_back(lemma);
  }
  result.exported = dedup(eligible);
  for (const auto& lemma : result.exported) ++report.rules[lemma.rule].exported;

  for (const auto& [rule, rc] : report.rules) {
    report.candidates_total += rc.candidates;
    report.verified_total += rc.verified;
    report.exported_total += rc.exported;
  }
  recurse_into(pool, options, depth, result);
  return result;
}

}  // namespace

DecompositionResult run_decomposition(ReplPool& pool, const TheoremScript& script,
                                      const DecomposeOptions& options) {
  return run_decomposition_depth(pool, script, options, 0);
}

}  // namespace lemmaforge
