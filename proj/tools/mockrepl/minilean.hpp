/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

// A miniature Lean 4 stand-in: parses a small fragment of tactic-mode Lean,
// checks proofs over integer/natural arithmetic and propositional structure,
// and reports diagnostics, goal states, and sorries. It exists so the
// toolchain can be exercised end to end on machines without a Lean install;
// it deliberately shares no code with the library under test.
//
// Supported fragment (integer semantics; no truncated Nat subtraction):
//   terms:    numerals, variables, + - * / % ^, = ≠ < ≤ > ≥ ∣, ∧ ∨ → ¬,
//             True, False, parentheses
//   tactics:  intro, exact, apply, constructor, have, exfalso, skip,
//             norm_num, omega, linarith, ring, rfl, simp, norm_cast,
//             trivial, assumption, exact?, hint, sorry, all_goals, sleep
//   structure: one tactic per line, `;` and `<;>` sequencing, indentation
//             blocks under `have ... := by`

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minilean {

enum class Op {
  Add, Sub, Mul, Div, Mod, Pow,
  Eq, Ne, Lt, Le, Gt, Ge, Dvd,
  And, Or, Imp,
};

enum class ExprKind { Num, Var, TrueK, FalseK, Bin, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  long long num = 0;
  std::string var;
  Op op = Op::Add;
  ExprPtr lhs, rhs;

  static ExprPtr number(long long v);
  static ExprPtr variable(std::string name);
  static ExprPtr truth(bool value);
  static ExprPtr bin(Op op, ExprPtr l, ExprPtr r);
  static ExprPtr negation(ExprPtr e);
};

bool equal(const ExprPtr& a, const ExprPtr& b);
std::string print(const ExprPtr& e);

/// Throws ParseFail with a message on malformed input.
struct ParseFail {
  std::string message;
};
ExprPtr parse_expr(const std::string& text);

struct Hypothesis {
  std::string name;
  ExprPtr type;
};

/// True when the type is a value-binder type (ℕ/Nat/ℤ/Int), not a Prop.
bool is_value_type(const ExprPtr& type);
bool is_nat_type(const ExprPtr& type);

struct Goal {
  std::vector<Hypothesis> hyps;
  ExprPtr target;
};

std::string pretty_goal(const Goal& goal);

struct Diag {
  std::string severity;  // "error" | "warning" | "info"
  int line = 1;          // 1-based
  int column = 0;
  std::string text;
};

struct SorryRecord {
  int line = 1;
  int column = 0;
  std::string goal_pretty;
};

struct CheckOutcome {
  std::vector<Diag> diags;
  std::vector<SorryRecord> sorries;
  // Names added by this command, with the printable statement for
  // binder-free propositions (empty otherwise).
  std::vector<std::pair<std::string, std::string>> declared;
};

/// Declared global names visible to proofs (contents opaque to the checker).
using Env = std::map<std::string, std::string>;

/// Runs every declaration in `source` against `env`. Line numbers in the
/// outcome are 1-based positions in `source`.
CheckOutcome check_source(const std::string& source, const Env& env);

}  // namespace minilean
