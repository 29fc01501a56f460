/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/proof_model.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace lemmaforge {

namespace {

using util::indent_of;
using util::trim;

// Bracket depth tracking over UTF-8 text. Handles (), {}, [], ⟨⟩, ⦃⦄.
struct DepthScanner {
  int depth = 0;

  // Returns the byte length consumed at `pos`.
  size_t step(std::string_view text, size_t pos) {
    char c = text[pos];
    if (c == '(' || c == '{' || c == '[') { ++depth; return 1; }
    if (c == ')' || c == '}' || c == ']') { --depth; return 1; }
    if (text.compare(pos, 3, "⟨") == 0 || text.compare(pos, 3, "⦃") == 0) {
      ++depth;
      return 3;
    }
    if (text.compare(pos, 3, "⟩") == 0 || text.compare(pos, 3, "⦄") == 0) {
      --depth;
      return 3;
    }
    return 1;
  }
};

// Position of the first occurrence of `needle` at bracket depth 0, or npos.
size_t find_top_level(std::string_view text, std::string_view needle, size_t from = 0) {
  DepthScanner scan;
  size_t pos = 0;
  while (pos < text.size()) {
    if (scan.depth == 0 && pos >= from && text.compare(pos, needle.size(), needle) == 0) {
      // `:=` must not match inside `:=` lookalikes; callers pass exact tokens.
      return pos;
    }
    pos += scan.step(text, pos);
  }
  return std::string_view::npos;
}

bool is_word_at(std::string_view text, size_t pos, std::string_view word) {
  if (text.compare(pos, word.size(), word) != 0) return false;
  size_t end = pos + word.size();
  bool left_ok = pos == 0 || !util::is_ident_start_byte(text, pos - 1);
  bool right_ok = end >= text.size() || (!util::is_ident_start_byte(text, end) &&
                                         !std::isdigit(static_cast<unsigned char>(text[end])));
  return left_ok && right_ok;
}

// Matches "theorem NAME" / "lemma NAME" at the start of a column-0 line,
// allowing `private`/`protected` and `@[...]` attribute prefixes.
bool line_declares(const std::string& line, const std::string& name, size_t* name_end) {
  if (line.empty() || line[0] == ' ') return false;
  size_t pos = 0;
  auto skip_ws = [&] { while (pos < line.size() && line[pos] == ' ') ++pos; };
  if (line.compare(pos, 2, "@[") == 0) {
    size_t close = line.find(']', pos);
    if (close == std::string::npos) return false;
    pos = close + 1;
    skip_ws();
  }
  for (std::string_view mod : {"private", "protected"}) {
    if (is_word_at(line, pos, mod)) {
      pos += mod.size();
      skip_ws();
    }
  }
  bool kw = false;
  for (std::string_view k : {"theorem", "lemma"}) {
    if (is_word_at(line, pos, k)) {
      pos += k.size();
      kw = true;
      break;
    }
  }
  if (!kw) return false;
  skip_ws();
  if (!is_word_at(line, pos, name)) return false;
  *name_end = pos + name.size();
  return true;
}

struct HeaderParts {
  std::vector<Binder> binders;
  std::string goal_text;
  size_t by_end = 0;  // byte offset just past the `by` token in the header text
};

// Parses binder groups and the goal out of the text following the theorem
// name, up to `:= by`.
HeaderParts parse_header_tail(std::string_view tail, const std::string& ctx) {
  HeaderParts parts;
  size_t pos = 0;
  int group_id = 0;
  auto skip_ws = [&] {
    while (pos < tail.size() && (tail[pos] == ' ' || tail[pos] == '\n')) ++pos;
  };
  skip_ws();
  while (pos < tail.size()) {
    char open = tail[pos];
    BinderKind kind = BinderKind::Explicit;
    if (open == '(') kind = BinderKind::Explicit;
    else if (open == '{') kind = BinderKind::Implicit;
    else if (open == '[') kind = BinderKind::Instance;
    else break;
    DepthScanner scan;
    size_t start = pos;
    size_t end = std::string_view::npos;
    size_t p = pos;
    while (p < tail.size()) {
      p += scan.step(tail, p);
      if (scan.depth == 0) { end = p; break; }
    }
    if (end == std::string_view::npos) {
      throw ParseError(ParseError::Code::MalformedHeader,
                       "unterminated binder group in '" + ctx + "'");
    }
    std::string_view inner = tail.substr(start + 1, end - start - 2);
    size_t colon = find_top_level(inner, " : ");
    if (colon == std::string_view::npos) {
      // `[DecidableEq α]`-style instance binder without a name.
      if (kind != BinderKind::Instance || trim(inner).empty()) {
        throw ParseError(ParseError::Code::MalformedHeader,
                         "binder group without type ascription in '" + ctx + "'");
      }
      Binder b;
      b.name = "_";
      b.type_text = std::string(trim(inner));
      b.kind = kind;
      b.group = group_id;
      parts.binders.push_back(std::move(b));
    } else {
      std::string_view names = trim(inner.substr(0, colon));
      std::string type_text{trim(inner.substr(colon + 3))};
      if (type_text.empty()) {
        throw ParseError(ParseError::Code::MalformedHeader,
                         "empty binder type in '" + ctx + "'");
      }
      std::istringstream ns{std::string(names)};
      std::string n;
      while (ns >> n) {
        Binder b;
        b.name = n;
        b.type_text = type_text;
        b.kind = kind;
        b.group = group_id;
        parts.binders.push_back(std::move(b));
      }
    }
    ++group_id;
    pos = end;
    skip_ws();
  }
  // Now expect `: GOAL := by`.
  if (pos >= tail.size() || tail[pos] != ':' ||
      (pos + 1 < tail.size() && tail[pos + 1] == '=')) {
    throw ParseError(ParseError::Code::MalformedHeader,
                     "missing goal ascription in '" + ctx + "'");
  }
  ++pos;
  size_t assign = find_top_level(tail, ":=", pos);
  if (assign == std::string_view::npos) {
    throw ParseError(ParseError::Code::TermModeProof,
                     "no `:=` found for '" + ctx + "'");
  }
  parts.goal_text = util::collapse_ws(tail.substr(pos, assign - pos));
  if (parts.goal_text.empty()) {
    throw ParseError(ParseError::Code::MalformedHeader, "empty goal in '" + ctx + "'");
  }
  size_t after = assign + 2;
  while (after < tail.size() && (tail[after] == ' ' || tail[after] == '\n')) ++after;
  if (!is_word_at(tail, after, "by")) {
    throw ParseError(ParseError::Code::TermModeProof,
                     "proof of '" + ctx + "' is not in tactic mode");
  }
  parts.by_end = after + 2;
  return parts;
}

std::optional<HaveIntro> parse_have(std::string_view stripped) {
  if (!util::starts_with_word(stripped, "have")) return std::nullopt;
  std::string_view rest = trim(stripped.substr(4));
  HaveIntro intro;
  if (!rest.empty() && rest[0] == ':' && (rest.size() < 2 || rest[1] != '=')) {
    intro.hyp_name = "this";  // `have : T := ...`
  } else {
    if (rest.empty() || !util::is_ident_start_byte(rest, 0)) return std::nullopt;
    size_t end = util::ident_end(rest, 0);
    intro.hyp_name = std::string(rest.substr(0, end));
    rest = trim(rest.substr(end));
    // Skip binder groups: `have key (x : ℕ) : P x := ...`.
    while (!rest.empty() && (rest[0] == '(' || rest[0] == '{' || rest[0] == '[')) {
      DepthScanner scan;
      size_t p = 0;
      while (p < rest.size()) {
        p += scan.step(rest, p);
        if (scan.depth == 0) break;
      }
      rest = trim(rest.substr(p));
    }
    if (rest.empty() || rest[0] != ':' || (rest.size() > 1 && rest[1] == '=')) {
      return std::nullopt;  // `have h := ...` has no type ascription
    }
  }
  size_t colon = rest.find(':');
  std::string_view after = rest.substr(colon + 1);
  size_t assign = find_top_level(after, ":=");
  std::string_view type_part =
      assign == std::string_view::npos ? after : after.substr(0, assign);
  intro.hyp_type_text = util::collapse_ws(type_part);
  if (intro.hyp_type_text.empty()) return std::nullopt;
  return intro;
}

}  // namespace

std::vector<TacticLine> classify_body(const std::vector<std::string>& raw_lines) {
  std::vector<TacticLine> body;
  bool in_block_comment = false;
  for (size_t i = 0; i < raw_lines.size(); ++i) {
    TacticLine tl;
    tl.index = static_cast<int>(i);
    tl.text = raw_lines[i];
    tl.indent = indent_of(tl.text);
    std::string_view stripped = trim(tl.text);
    if (in_block_comment) {
      tl.kind = LineKind::CommentOrBlank;
      if (stripped.find("-/") != std::string_view::npos) in_block_comment = false;
    } else if (stripped.empty() || stripped.substr(0, 2) == "--") {
      tl.kind = LineKind::CommentOrBlank;
    } else if (stripped.substr(0, 2) == "/-") {
      tl.kind = LineKind::CommentOrBlank;
      if (stripped.find("-/", 2) == std::string_view::npos) in_block_comment = true;
    } else if (auto intro = parse_have(stripped)) {
      tl.kind = LineKind::HaveIntro;
      tl.introduced = std::move(intro);
    } else if (stripped.substr(0, 2) == "·" || util::starts_with_word(stripped, "case") ||
               util::starts_with_word(stripped, "next")) {
      tl.kind = LineKind::BlockOpen;
    } else {
      tl.kind = LineKind::Plain;
    }
    body.push_back(std::move(tl));
  }
  return body;
}

TheoremScript parse_theorem(const std::string& source_text, const std::string& theorem_name) {
  std::vector<std::string> lines = util::split_lines(source_text);
  size_t decl_line = lines.size();
  size_t name_end = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (line_declares(lines[i], theorem_name, &name_end)) {
      decl_line = i;
      break;
    }
  }
  if (decl_line == lines.size()) {
    throw ParseError(ParseError::Code::NotFound,
                     "no theorem or lemma named '" + theorem_name + "'");
  }

  TheoremScript script;
  script.name = theorem_name;
  for (size_t i = 0; i < decl_line; ++i) {
    script.preamble += lines[i];
    script.preamble += '\n';
  }

  // Join the header until `:= by` is found at depth 0; headers may span lines.
  std::string header = lines[decl_line];
  size_t header_last_line = decl_line;
  HeaderParts parts;
  for (;;) {
    std::string_view tail = std::string_view(header).substr(name_end);
    try {
      parts = parse_header_tail(tail, theorem_name);
      break;
    } catch (const ParseError& e) {
      if (e.code() == ParseError::Code::NotFound) throw;
      if (header_last_line + 1 >= lines.size()) throw;
      // Multi-line header: pull in the next line and retry.
      ++header_last_line;
      header += '\n';
      header += lines[header_last_line];
    }
  }
  script.binders = parts.binders;
  script.goal_text = parts.goal_text;
  std::set<std::string> seen_names;
  for (const auto& b : script.binders) {
    if (b.name != "_" && !seen_names.insert(b.name).second) {
      throw ParseError(ParseError::Code::MalformedHeader,
                       "duplicate binder name '" + b.name + "' in '" + theorem_name + "'");
    }
  }
  size_t by_end_abs = name_end + parts.by_end;
  script.header_verbatim = header.substr(0, by_end_abs);

  std::vector<std::string> raw_body;
  bool inline_first = false;
  std::string after_by{trim(std::string_view(header).substr(by_end_abs))};
  if (!after_by.empty()) {
    raw_body.push_back("  " + after_by);
    inline_first = true;
  }
  for (size_t i = header_last_line + 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (!line.empty() && line[0] != ' ' && !trim(line).empty()) break;  // next decl
    raw_body.push_back(line);
  }
  while (!raw_body.empty() && trim(raw_body.back()).empty()) raw_body.pop_back();

  script.body = classify_body(raw_body);
  if (inline_first && !script.body.empty()) script.body[0].same_line_as_header = true;
  return script;
}

int TheoremScript::base_indent() const {
  int best = -1;
  for (const auto& tl : body) {
    if (tl.kind == LineKind::CommentOrBlank) continue;
    if (best < 0 || tl.indent < best) best = tl.indent;
  }
  return best < 0 ? 0 : best;
}

std::string TheoremScript::statement_text() const {
  if (!header_verbatim.empty()) {
    std::string_view h = header_verbatim;
    size_t assign = std::string_view::npos;
    // Last `:=` at depth 0 is the proof assignment.
    for (size_t from = 0;;) {
      size_t p = find_top_level(h, ":=", from);
      if (p == std::string_view::npos) break;
      assign = p;
      from = p + 2;
    }
    if (assign != std::string_view::npos) {
      return std::string(util::rtrim(h.substr(0, assign)));
    }
    return std::string(h);
  }
  std::string out = "theorem " + name;
  int prev_group = -1;
  std::string group_text;
  auto flush = [&](BinderKind kind) {
    if (group_text.empty()) return;
    char open = kind == BinderKind::Explicit ? '(' : kind == BinderKind::Implicit ? '{' : '[';
    char close = kind == BinderKind::Explicit ? ')' : kind == BinderKind::Implicit ? '}' : ']';
    out += ' ';
    out += open;
    out += group_text;
    out += close;
    group_text.clear();
  };
  BinderKind prev_kind = BinderKind::Explicit;
  std::string prev_type;
  for (const auto& b : binders) {
    if (prev_group == b.group && b.type_text == prev_type) {
      group_text = group_text.substr(0, group_text.find(" : "));
      group_text += " " + b.name + " : " + b.type_text;
    } else {
      flush(prev_kind);
      group_text = b.name + " : " + b.type_text;
    }
    prev_group = b.group;
    prev_kind = b.kind;
    prev_type = b.type_text;
  }
  flush(prev_kind);
  out += " : " + goal_text;
  return out;
}

std::string print_theorem(const TheoremScript& script) {
  std::string out = script.preamble;
  std::string header = script.header_verbatim.empty()
                           ? script.statement_text() + " := by"
                           : script.header_verbatim;
  out += header;
  size_t first = 0;
  if (!script.body.empty() && script.body[0].same_line_as_header) {
    out += ' ';
    out += trim(script.body[0].text);
    first = 1;
  }
  out += '\n';
  for (size_t i = first; i < script.body.size(); ++i) {
    out += util::rtrim(script.body[i].text);
    out += '\n';
  }
  return out;
}

int proof_length(const std::vector<TacticLine>& body) {
  int n = 0;
  for (const auto& tl : body) {
    if (tl.kind != LineKind::CommentOrBlank) ++n;
  }
  return n;
}

int proof_length_of_text(const std::string& proof_text) {
  return proof_length(classify_body(util::split_lines(proof_text)));
}

std::vector<int> top_level_have_indices(const TheoremScript& script) {
  std::vector<int> out;
  int base = script.base_indent();
  for (const auto& tl : script.body) {
    if (tl.kind == LineKind::HaveIntro && tl.indent == base) out.push_back(tl.index);
  }
  return out;
}

TheoremScript make_script(const std::string& name, const std::vector<Binder>& binders,
                          const std::string& goal_text, const std::vector<std::string>& body_lines,
                          const std::string& preamble) {
  TheoremScript script;
  script.name = name;
  script.binders = binders;
  script.goal_text = goal_text;
  script.preamble = preamble;
  std::vector<std::string> indented;
  indented.reserve(body_lines.size());
  for (const auto& l : body_lines) {
    if (trim(l).empty()) indented.emplace_back();
    else indented.push_back("  " + l);
  }
  script.body = classify_body(indented);
  return script;
}

}  // namespace lemmaforge
