/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lemmaforge/util.hpp"

namespace lemmaforge {

/// Structural (non-elaborating) model of Lean 4 theorem scripts. Parsing is
/// line/indentation based: it segments a tactic proof into lines and blocks
/// and captures binders and `have` introductions, but performs no semantic
/// analysis; the verification oracle is the semantic authority.

enum class BinderKind { Explicit, Implicit, Instance };

struct Binder {
  std::string name;       // "_" for anonymous binders
  std::string type_text;  // verbatim Lean expression text
  BinderKind kind = BinderKind::Explicit;
  int group = 0;  // binders parsed from one (x y : T) group share an id
};

enum class LineKind { HaveIntro, Plain, BlockOpen, BlockClose, CommentOrBlank };

struct HaveIntro {
  std::string hyp_name;
  std::string hyp_type_text;
};

struct TacticLine {
  int index = 0;  // 0-based, contiguous within a body
  std::string text;  // verbatim, including leading indentation
  int indent = 0;
  LineKind kind = LineKind::Plain;
  std::optional<HaveIntro> introduced;
  // True for a tactic that appeared on the header line after `:= by`.
  bool same_line_as_header = false;
};

struct TheoremScript {
  std::string name;
  std::vector<Binder> binders;
  std::string goal_text;
  std::vector<TacticLine> body;
  std::string source_path;
  std::string preamble;  // verbatim import/open header text (may be empty)
  // Declaration text from the keyword through `by`, verbatim, used to
  // reproduce the input byte-for-byte. Empty for synthesized scripts.
  std::string header_verbatim;

  /// "theorem <name> <binders> : <goal>" without the `:= by` tail.
  std::string statement_text() const;
  /// Minimum indent over non-comment body lines (the top level of the proof).
  int base_indent() const;
};

class ParseError : public Error {
 public:
  enum class Code { NotFound, TermModeProof, MalformedHeader };
  ParseError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Parses the declaration named `theorem_name` out of `source_text`.
/// Everything before the declaration is kept verbatim as the preamble; the
/// body ends at the next column-0 declaration or end of file.
TheoremScript parse_theorem(const std::string& source_text, const std::string& theorem_name);

/// Emits compilable Lean source: preamble, header, and body.
std::string print_theorem(const TheoremScript& script);

/// Count of body lines that are not comments or blanks. A line holding
/// several tactics joined with `;` or `<;>` still counts once.
int proof_length(const std::vector<TacticLine>& body);

/// Same accounting applied to a raw tactic-body string.
int proof_length_of_text(const std::string& proof_text);

/// Indices of top-level `have` introductions (indent == base indent).
std::vector<int> top_level_have_indices(const TheoremScript& script);

/// Builds a script from parts (used for synthesized lemmas). Body lines are
/// indented by two spaces; indices and kinds are derived.
TheoremScript make_script(const std::string& name, const std::vector<Binder>& binders,
                          const std::string& goal_text, const std::vector<std::string>& body_lines,
                          const std::string& preamble);

/// Classifies raw body lines (re-derives TacticLine metadata).
std::vector<TacticLine> classify_body(const std::vector<std::string>& raw_lines);

}  // namespace lemmaforge
