/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "minilean.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <set>
#include <thread>

namespace minilean {

using i128 = __int128;

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

ExprPtr Expr::number(long long v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Num;
  e->num = v;
  return e;
}

ExprPtr Expr::variable(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr Expr::truth(bool value) {
  auto e = std::make_shared<Expr>();
  e->kind = value ? ExprKind::TrueK : ExprKind::FalseK;
  return e;
}

ExprPtr Expr::bin(Op op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Bin;
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

ExprPtr Expr::negation(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Not;
  e->lhs = std::move(inner);
  return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Num: return a->num == b->num;
    case ExprKind::Var: return a->var == b->var;
    case ExprKind::TrueK:
    case ExprKind::FalseK: return true;
    case ExprKind::Bin:
      return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case ExprKind::Not: return equal(a->lhs, b->lhs);
  }
  return false;
}

bool is_value_type(const ExprPtr& type) {
  return type && type->kind == ExprKind::Var &&
         (type->var == "ℕ" || type->var == "Nat" || type->var == "ℤ" ||
          type->var == "Int");
}

bool is_nat_type(const ExprPtr& type) {
  return type && type->kind == ExprKind::Var &&
         (type->var == "ℕ" || type->var == "Nat");
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class TokKind { Num, Ident, Sym, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  long long num = 0;
};

bool is_op_codepoint(uint32_t cp) {
  switch (cp) {
    case 0x00AC:  // ¬
    case 0x2192:  // →
    case 0x2194:  // ↔
    case 0x2223:  // ∣
    case 0x2227:  // ∧
    case 0x2228:  // ∨
    case 0x2260:  // ≠
    case 0x2264:  // ≤
    case 0x2265:  // ≥
    case 0x22A2:  // ⊢
    case 0x27E8:  // ⟨
    case 0x27E9:  // ⟩
    case 0x00B7:  // ·
      return true;
    default:
      return false;
  }
}

uint32_t decode_cp(const std::string& s, size_t pos, size_t& len) {
  unsigned char c = static_cast<unsigned char>(s[pos]);
  if (c < 0x80) { len = 1; return c; }
  size_t extra = (c & 0xE0) == 0xC0 ? 1 : (c & 0xF0) == 0xE0 ? 2 : (c & 0xF8) == 0xF0 ? 3 : 0;
  if (extra == 0 || pos + extra >= s.size()) { len = 1; return c; }
  uint32_t cp = c & (0x3F >> extra);
  for (size_t i = 1; i <= extra; ++i) cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
  len = extra + 1;
  return cp;
}

std::string encode_cp(uint32_t cp) {
  std::string out;
  if (cp < 0x80) out.push_back(static_cast<char>(cp));
  else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> toks;
  size_t pos = 0;
  auto push_sym = [&](std::string s) { toks.push_back({TokKind::Sym, std::move(s), 0}); };
  while (pos < text.size()) {
    char c = text[pos];
    if (c == ' ' || c == '\t') { ++pos; continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t end = pos;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      Token t;
      t.kind = TokKind::Num;
      t.text = text.substr(pos, end - pos);
      t.num = std::stoll(t.text);
      toks.push_back(std::move(t));
      pos = end;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos;
      while (end < text.size()) {
        unsigned char ec = static_cast<unsigned char>(text[end]);
        if (ec < 0x80) {
          if (std::isalnum(ec) || ec == '_' || ec == '\'' || ec == '!' || ec == '?') { ++end; continue; }
          if (ec == '.' && end + 1 < text.size() &&
              (std::isalpha(static_cast<unsigned char>(text[end + 1])) || text[end + 1] == '_')) {
            ++end;  // qualified names like And.intro
            continue;
          }
          break;
        }
        size_t len = 0;
        uint32_t cp = decode_cp(text, end, len);
        if (is_op_codepoint(cp)) break;
        end += len;
      }
      toks.push_back({TokKind::Ident, text.substr(pos, end - pos), 0});
      pos = end;
      continue;
    }
    // Multi-char ASCII symbols.
    if (text.compare(pos, 3, "<;>") == 0) { push_sym("<;>"); pos += 3; continue; }
    if (text.compare(pos, 2, ":=") == 0) { push_sym(":="); pos += 2; continue; }
    if (text.compare(pos, 2, "->") == 0) { push_sym("→"); pos += 2; continue; }
    if (text.compare(pos, 2, "<=") == 0) { push_sym("≤"); pos += 2; continue; }
    if (text.compare(pos, 2, ">=") == 0) { push_sym("≥"); pos += 2; continue; }
    if (text.compare(pos, 2, "!=") == 0) { push_sym("≠"); pos += 2; continue; }
    if (static_cast<unsigned char>(c) < 0x80) {
      if (c == '.' && pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
        // projection .1 / .2
        size_t end = pos + 1;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        push_sym(text.substr(pos, end - pos));
        pos = end;
        continue;
      }
      push_sym(std::string(1, c));
      ++pos;
      continue;
    }
    size_t len = 0;
    uint32_t cp = decode_cp(text, pos, len);
    if (is_op_codepoint(cp)) {
      push_sym(encode_cp(cp));
      pos += len;
      continue;
    }
    // Non-ASCII identifier (ℕ, ℤ, h₀, α, ...).
    size_t end = pos;
    while (end < text.size()) {
      unsigned char ec = static_cast<unsigned char>(text[end]);
      if (ec < 0x80) {
        if (std::isalnum(ec) || ec == '_' || ec == '\'' || ec == '!' || ec == '?') { ++end; continue; }
        break;
      }
      size_t l2 = 0;
      uint32_t cp2 = decode_cp(text, end, l2);
      if (is_op_codepoint(cp2)) break;
      end += l2;
    }
    toks.push_back({TokKind::Ident, text.substr(pos, end - pos), 0});
    pos = end;
  }
  toks.push_back({TokKind::End, "", 0});
  return toks;
}

// ---------------------------------------------------------------------------
// Parser (precedence climbing)
// ---------------------------------------------------------------------------

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  Token take() { return toks[pos++]; }
  bool at_sym(const std::string& s) const {
    return peek().kind == TokKind::Sym && peek().text == s;
  }
  void expect_sym(const std::string& s) {
    if (!at_sym(s)) throw ParseFail{"expected '" + s + "'"};
    ++pos;
  }

  ExprPtr parse(int min_prec = 0) {
    ExprPtr lhs = parse_prefix();
    for (;;) {
      const Token& t = peek();
      if (t.kind != TokKind::Sym) break;
      int prec = -1;
      Op op{};
      bool right_assoc = false;
      if (t.text == "→") { prec = 10; op = Op::Imp; right_assoc = true; }
      else if (t.text == "∨") { prec = 20; op = Op::Or; right_assoc = true; }
      else if (t.text == "∧") { prec = 30; op = Op::And; right_assoc = true; }
      else if (t.text == "=") { prec = 40; op = Op::Eq; }
      else if (t.text == "≠") { prec = 40; op = Op::Ne; }
      else if (t.text == "<") { prec = 40; op = Op::Lt; }
      else if (t.text == "≤") { prec = 40; op = Op::Le; }
      else if (t.text == ">") { prec = 40; op = Op::Gt; }
      else if (t.text == "≥") { prec = 40; op = Op::Ge; }
      else if (t.text == "∣") { prec = 40; op = Op::Dvd; }
      else if (t.text == "+") { prec = 60; op = Op::Add; }
      else if (t.text == "-") { prec = 60; op = Op::Sub; }
      else if (t.text == "*") { prec = 70; op = Op::Mul; }
      else if (t.text == "/") { prec = 70; op = Op::Div; }
      else if (t.text == "%") { prec = 70; op = Op::Mod; }
      else if (t.text == "^") { prec = 80; op = Op::Pow; right_assoc = true; }
      if (prec < min_prec) break;
      ++pos;
      int next_min = right_assoc ? prec : prec + 1;
      // Comparisons are non-associative: parse operands above their level.
      if (prec == 40) next_min = 41;
      ExprPtr rhs = parse(next_min);
      lhs = Expr::bin(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_prefix() {
    const Token& t = peek();
    if (t.kind == TokKind::Sym && t.text == "¬") {
      ++pos;
      return Expr::negation(parse(35));
    }
    if (t.kind == TokKind::Sym && t.text == "-") {
      ++pos;
      return Expr::bin(Op::Sub, Expr::number(0), parse(75));
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    Token t = take();
    if (t.kind == TokKind::Num) return Expr::number(t.num);
    if (t.kind == TokKind::Ident) {
      if (t.text == "True") return Expr::truth(true);
      if (t.text == "False") return Expr::truth(false);
      return Expr::variable(t.text);
    }
    if (t.kind == TokKind::Sym && t.text == "(") {
      ExprPtr inner = parse(0);
      expect_sym(")");
      return inner;
    }
    throw ParseFail{"unexpected token '" + t.text + "'"};
  }
};

int print_prec(Op op) {
  switch (op) {
    case Op::Imp: return 10;
    case Op::Or: return 20;
    case Op::And: return 30;
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le:
    case Op::Gt: case Op::Ge: case Op::Dvd: return 40;
    case Op::Add: case Op::Sub: return 60;
    case Op::Mul: case Op::Div: case Op::Mod: return 70;
    case Op::Pow: return 80;
  }
  return 0;
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Pow: return "^";
    case Op::Eq: return "=";
    case Op::Ne: return "≠";
    case Op::Lt: return "<";
    case Op::Le: return "≤";
    case Op::Gt: return ">";
    case Op::Ge: return "≥";
    case Op::Dvd: return "∣";
    case Op::And: return "∧";
    case Op::Or: return "∨";
    case Op::Imp: return "→";
  }
  return "?";
}

void print_rec(const ExprPtr& e, int min_prec, std::string& out) {
  switch (e->kind) {
    case ExprKind::Num: out += std::to_string(e->num); return;
    case ExprKind::Var: out += e->var; return;
    case ExprKind::TrueK: out += "True"; return;
    case ExprKind::FalseK: out += "False"; return;
    case ExprKind::Not: {
      bool paren = 35 < min_prec;
      if (paren) out += '(';
      out += "¬";
      print_rec(e->lhs, 36, out);
      if (paren) out += ')';
      return;
    }
    case ExprKind::Bin: {
      int prec = print_prec(e->op);
      bool right_assoc = e->op == Op::Imp || e->op == Op::Or || e->op == Op::And || e->op == Op::Pow;
      bool paren = prec < min_prec;
      if (paren) out += '(';
      print_rec(e->lhs, right_assoc ? prec + 1 : prec, out);
      out += ' ';
      out += op_symbol(e->op);
      out += ' ';
      print_rec(e->rhs, right_assoc ? prec : prec + 1, out);
      if (paren) out += ')';
      return;
    }
  }
}

}  // namespace

std::string print(const ExprPtr& e) {
  std::string out;
  print_rec(e, 0, out);
  return out;
}

ExprPtr parse_expr(const std::string& text) {
  std::vector<Token> toks = lex(text);
  Parser p{toks};
  ExprPtr e = p.parse(0);
  if (p.peek().kind != TokKind::End) {
    throw ParseFail{"unexpected token '" + p.peek().text + "' after expression"};
  }
  return e;
}

// ---------------------------------------------------------------------------
// Ground evaluation
// ---------------------------------------------------------------------------

namespace {

const i128 kEvalCap = i128(1) << 100;

std::optional<i128> eval_int(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Num: return i128(e->num);
    case ExprKind::Var: case ExprKind::TrueK: case ExprKind::FalseK: case ExprKind::Not:
      return std::nullopt;
    case ExprKind::Bin: break;
  }
  auto l = eval_int(e->lhs);
  auto r = eval_int(e->rhs);
  if (!l || !r) return std::nullopt;
  switch (e->op) {
    case Op::Add: return *l + *r;
    case Op::Sub: return *l - *r;
    case Op::Mul: {
      if (*l == 0 || *r == 0) return i128(0);
      i128 al = *l < 0 ? -*l : *l;
      i128 ar = *r < 0 ? -*r : *r;
      if (al > kEvalCap / ar) return std::nullopt;
      return *l * *r;
    }
    case Op::Div: return *r == 0 ? std::optional<i128>(i128(0)) : std::optional<i128>(*l / *r);
    case Op::Mod: return *r == 0 ? std::optional<i128>(*l) : std::optional<i128>(*l % *r);
    case Op::Pow: {
      if (*r < 0 || *r > 128) return std::nullopt;
      i128 acc = 1;
      for (i128 i = 0; i < *r; ++i) {
        if (acc > kEvalCap || acc < -kEvalCap) return std::nullopt;
        acc *= *l;
      }
      return acc;
    }
    default: return std::nullopt;
  }
}

enum class Tri { T, F, Unknown };

Tri eval_prop(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::TrueK: return Tri::T;
    case ExprKind::FalseK: return Tri::F;
    case ExprKind::Not: {
      Tri t = eval_prop(e->lhs);
      return t == Tri::T ? Tri::F : t == Tri::F ? Tri::T : Tri::Unknown;
    }
    case ExprKind::Num: case ExprKind::Var: return Tri::Unknown;
    case ExprKind::Bin: break;
  }
  switch (e->op) {
    case Op::And: {
      Tri a = eval_prop(e->lhs), b = eval_prop(e->rhs);
      if (a == Tri::F || b == Tri::F) return Tri::F;
      if (a == Tri::T && b == Tri::T) return Tri::T;
      return Tri::Unknown;
    }
    case Op::Or: {
      Tri a = eval_prop(e->lhs), b = eval_prop(e->rhs);
      if (a == Tri::T || b == Tri::T) return Tri::T;
      if (a == Tri::F && b == Tri::F) return Tri::F;
      return Tri::Unknown;
    }
    case Op::Imp: {
      Tri a = eval_prop(e->lhs), b = eval_prop(e->rhs);
      if (a == Tri::F || b == Tri::T) return Tri::T;
      if (a == Tri::T && b == Tri::F) return Tri::F;
      return Tri::Unknown;
    }
    default: break;
  }
  auto l = eval_int(e->lhs);
  auto r = eval_int(e->rhs);
  if (!l || !r) return Tri::Unknown;
  bool v;
  switch (e->op) {
    case Op::Eq: v = *l == *r; break;
    case Op::Ne: v = *l != *r; break;
    case Op::Lt: v = *l < *r; break;
    case Op::Le: v = *l <= *r; break;
    case Op::Gt: v = *l > *r; break;
    case Op::Ge: v = *l >= *r; break;
    case Op::Dvd: v = *l == 0 ? *r == 0 : (*r % *l == 0); break;
    default: return Tri::Unknown;
  }
  return v ? Tri::T : Tri::F;
}

// ---------------------------------------------------------------------------
// Polynomial normalization (for ring / rfl)
// ---------------------------------------------------------------------------

using Monomial = std::map<std::string, int>;
using Poly = std::map<Monomial, i128>;

void poly_add(Poly& a, const Poly& b, i128 scale) {
  for (const auto& [m, c] : b) {
    a[m] += c * scale;
    if (a[m] == 0) a.erase(m);
  }
}

std::optional<Poly> poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  if (a.size() * b.size() > 4096) return std::nullopt;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = ma;
      for (const auto& [v, e] : mb) m[v] += e;
      out[m] += ca * cb;
      if (out[m] == 0) out.erase(m);
    }
  }
  return out;
}

std::optional<Poly> poly_of(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Num: {
      Poly p;
      if (e->num != 0) p[{}] = e->num;
      return p;
    }
    case ExprKind::Var: {
      Poly p;
      p[{{e->var, 1}}] = 1;
      return p;
    }
    case ExprKind::TrueK: case ExprKind::FalseK: case ExprKind::Not: return std::nullopt;
    case ExprKind::Bin: break;
  }
  switch (e->op) {
    case Op::Add: case Op::Sub: {
      auto l = poly_of(e->lhs);
      auto r = poly_of(e->rhs);
      if (!l || !r) return std::nullopt;
      poly_add(*l, *r, e->op == Op::Add ? 1 : -1);
      return l;
    }
    case Op::Mul: {
      auto l = poly_of(e->lhs);
      auto r = poly_of(e->rhs);
      if (!l || !r) return std::nullopt;
      return poly_mul(*l, *r);
    }
    case Op::Pow: {
      auto base = poly_of(e->lhs);
      auto exp = eval_int(e->rhs);
      if (!base || !exp || *exp < 0 || *exp > 16) return std::nullopt;
      Poly acc;
      acc[{}] = 1;
      for (i128 i = 0; i < *exp; ++i) {
        auto next = poly_mul(acc, *base);
        if (!next) return std::nullopt;
        acc = *next;
      }
      return acc;
    }
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Linear arithmetic (omega / linarith)
// ---------------------------------------------------------------------------

// Constraint meaning: sum(coef[v] * v) + cst >= 0 over the integers.
struct LinCon {
  std::map<std::string, i128> coef;
  i128 cst = 0;
};

struct LinExpr {
  std::map<std::string, i128> coef;
  i128 cst = 0;
};

std::optional<LinExpr> linear_of(const ExprPtr& e) {
  auto poly = poly_of(e);
  if (!poly) return std::nullopt;
  LinExpr lin;
  for (const auto& [m, c] : *poly) {
    int degree = 0;
    for (const auto& [v, exp] : m) degree += exp;
    if (degree == 0) lin.cst += c;
    else if (degree == 1) lin.coef[m.begin()->first] += c;
    else return std::nullopt;
  }
  return lin;
}

// lhs OP rhs as zero or more "≥ 0" constraints; strict inequalities are
// tightened over the integers (a < b becomes b - a - 1 >= 0).
void push_cmp(std::vector<LinCon>& out, Op op, const LinExpr& l, const LinExpr& r) {
  auto ge0 = [&](const LinExpr& a, const LinExpr& b, i128 slack) {
    // a - b - slack >= 0
    LinCon con;
    con.coef = a.coef;
    for (const auto& [v, c] : b.coef) {
      con.coef[v] -= c;
      if (con.coef[v] == 0) con.coef.erase(v);
    }
    con.cst = a.cst - b.cst - slack;
    out.push_back(std::move(con));
  };
  switch (op) {
    case Op::Le: ge0(r, l, 0); break;
    case Op::Lt: ge0(r, l, 1); break;
    case Op::Ge: ge0(l, r, 0); break;
    case Op::Gt: ge0(l, r, 1); break;
    case Op::Eq: ge0(l, r, 0); ge0(r, l, 0); break;
    default: break;
  }
}

// Fourier-Motzkin feasibility over the rationals with integer tightening at
// entry. Returns false only when the system is definitely infeasible.
bool possibly_feasible(std::vector<LinCon> cons) {
  const size_t kMaxCons = 1200;
  const i128 kCoefCap = i128(1) << 90;
  for (int round = 0; round < 64; ++round) {
    std::set<std::string> vars;
    for (const auto& c : cons) {
      for (const auto& [v, coef] : c.coef) {
        if (coef != 0) vars.insert(v);
      }
    }
    if (vars.empty()) break;
    std::string v = *vars.begin();
    std::vector<LinCon> pos, neg, rest;
    for (auto& c : cons) {
      auto it = c.coef.find(v);
      i128 cv = it == c.coef.end() ? 0 : it->second;
      if (cv > 0) pos.push_back(std::move(c));
      else if (cv < 0) neg.push_back(std::move(c));
      else rest.push_back(std::move(c));
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        i128 a = p.coef.at(v);        // a > 0
        i128 b = -n.coef.at(v);       // b > 0
        LinCon combo;
        combo.cst = b * p.cst + a * n.cst;
        for (const auto& [var, c] : p.coef) combo.coef[var] += b * c;
        for (const auto& [var, c] : n.coef) combo.coef[var] += a * c;
        combo.coef.erase(v);
        for (auto it = combo.coef.begin(); it != combo.coef.end();) {
          if (it->second == 0) it = combo.coef.erase(it);
          else {
            if (it->second > kCoefCap || it->second < -kCoefCap) return true;  // give up
            ++it;
          }
        }
        rest.push_back(std::move(combo));
        if (rest.size() > kMaxCons) return true;  // give up, treat as unknown
      }
    }
    cons = std::move(rest);
  }
  for (const auto& c : cons) {
    if (c.coef.empty() && c.cst < 0) return false;
  }
  return true;
}

struct LinContext {
  std::vector<LinCon> hyp_cons;
  std::set<std::string> nat_vars;
};

void collect_hyp_constraints(const ExprPtr& prop, std::vector<LinCon>& out) {
  if (prop->kind == ExprKind::Bin && prop->op == Op::And) {
    collect_hyp_constraints(prop->lhs, out);
    collect_hyp_constraints(prop->rhs, out);
    return;
  }
  if (prop->kind != ExprKind::Bin) return;
  switch (prop->op) {
    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq: {
      auto l = linear_of(prop->lhs);
      auto r = linear_of(prop->rhs);
      if (l && r) push_cmp(out, prop->op, *l, *r);
      return;
    }
    default: return;
  }
}

LinContext build_lin_context(const std::vector<Hypothesis>& hyps) {
  LinContext ctx;
  for (const auto& h : hyps) {
    if (is_nat_type(h.type)) {
      ctx.nat_vars.insert(h.name);
    } else if (!is_value_type(h.type)) {
      collect_hyp_constraints(h.type, ctx.hyp_cons);
    }
  }
  return ctx;
}

void add_nat_bounds(std::vector<LinCon>& cons, const std::set<std::string>& nat_vars) {
  std::set<std::string> mentioned;
  for (const auto& c : cons) {
    for (const auto& [v, coef] : c.coef) mentioned.insert(v);
  }
  for (const auto& v : nat_vars) {
    if (mentioned.count(v)) {
      LinCon con;
      con.coef[v] = 1;
      cons.push_back(std::move(con));
    }
  }
}

bool refutes(const LinContext& ctx, const std::vector<LinCon>& negated_goal) {
  std::vector<LinCon> cons = ctx.hyp_cons;
  for (const auto& c : negated_goal) cons.push_back(c);
  add_nat_bounds(cons, ctx.nat_vars);
  return !possibly_feasible(std::move(cons));
}

// Decides a comparison/conjunction goal from linear hypotheses.
bool linear_prove(const LinContext& ctx, const ExprPtr& goal) {
  if (eval_prop(goal) == Tri::T) return true;
  if (goal->kind == ExprKind::TrueK) return true;
  if (goal->kind != ExprKind::Bin) return false;
  if (goal->op == Op::And) {
    return linear_prove(ctx, goal->lhs) && linear_prove(ctx, goal->rhs);
  }
  auto l = linear_of(goal->lhs);
  auto r = linear_of(goal->rhs);
  if (!l || !r) return false;
  std::vector<LinCon> neg;
  switch (goal->op) {
    case Op::Le: push_cmp(neg, Op::Gt, *l, *r); return refutes(ctx, neg);
    case Op::Lt: push_cmp(neg, Op::Ge, *l, *r); return refutes(ctx, neg);
    case Op::Ge: push_cmp(neg, Op::Lt, *l, *r); return refutes(ctx, neg);
    case Op::Gt: push_cmp(neg, Op::Le, *l, *r); return refutes(ctx, neg);
    case Op::Eq: {
      std::vector<LinCon> low, high;
      push_cmp(low, Op::Lt, *l, *r);   // l < r
      push_cmp(high, Op::Gt, *l, *r);  // l > r
      return refutes(ctx, low) && refutes(ctx, high);
    }
    case Op::Ne: {
      std::vector<LinCon> eq;
      push_cmp(eq, Op::Eq, *l, *r);
      return refutes(ctx, eq);
    }
    default: return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Goal pretty-printing (the REPL wire format for states)
// ---------------------------------------------------------------------------

std::string pretty_goal(const Goal& goal) {
  std::string out;
  size_t i = 0;
  while (i < goal.hyps.size()) {
    size_t j = i + 1;
    while (j < goal.hyps.size() && equal(goal.hyps[j].type, goal.hyps[i].type)) ++j;
    for (size_t k = i; k < j; ++k) {
      if (k > i) out += ' ';
      out += goal.hyps[k].name;
    }
    out += " : ";
    out += print(goal.hyps[i].type);
    out += '\n';
    i = j;
  }
  out += "⊢ ";
  out += print(goal.target);
  return out;
}

// ---------------------------------------------------------------------------
// Term elaboration (exact / apply / have := term)
// ---------------------------------------------------------------------------

namespace {

struct ElabFail {
  std::string message;
};

struct TermNode {
  enum class Kind { Ident, App, Anon, Proj } kind = Kind::Ident;
  std::string name;                  // Ident
  std::vector<TermNode> children;    // App: [fn, args...]; Anon: elements
  int proj = 0;                      // Proj: 1 or 2; child in children[0]
  std::string source;                // for error messages
};

struct TermParser {
  const std::vector<Token>& toks;
  size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  bool at_sym(const std::string& s) const {
    return peek().kind == TokKind::Sym && peek().text == s;
  }

  TermNode parse_term() {
    TermNode head = parse_primary();
    std::vector<TermNode> args;
    while (peek().kind == TokKind::Ident || at_sym("(") || at_sym("⟨")) {
      args.push_back(parse_primary());
    }
    if (args.empty()) return head;
    TermNode app;
    app.kind = TermNode::Kind::App;
    app.source = head.source;
    app.children.push_back(std::move(head));
    for (auto& a : args) app.children.push_back(std::move(a));
    return app;
  }

  TermNode parse_primary() {
    TermNode node;
    if (peek().kind == TokKind::Ident) {
      node.kind = TermNode::Kind::Ident;
      node.name = peek().text;
      node.source = node.name;
      ++pos;
    } else if (at_sym("(")) {
      ++pos;
      node = parse_term();
      if (!at_sym(")")) throw ElabFail{"expected ')'"};
      ++pos;
    } else if (at_sym("⟨")) {
      ++pos;
      node.kind = TermNode::Kind::Anon;
      for (;;) {
        node.children.push_back(parse_term());
        if (at_sym(",")) { ++pos; continue; }
        break;
      }
      if (!at_sym("⟩")) throw ElabFail{"expected '⟩'"};
      ++pos;
    } else {
      throw ElabFail{"unexpected token '" + peek().text + "' in term"};
    }
    for (;;) {
      if (at_sym(".1") || at_sym(".2")) {
        TermNode proj;
        proj.kind = TermNode::Kind::Proj;
        proj.proj = peek().text == ".1" ? 1 : 2;
        proj.children.push_back(std::move(node));
        node = std::move(proj);
        ++pos;
        continue;
      }
      break;
    }
    return node;
  }
};

struct ElabContext {
  const std::vector<Hypothesis>* hyps;
  const Env* env;
};

ExprPtr infer_term(const TermNode& t, const ElabContext& ctx);

void check_term(const TermNode& t, const ExprPtr& expected, const ElabContext& ctx) {
  if (t.kind == TermNode::Kind::Anon ||
      (t.kind == TermNode::Kind::App && t.children[0].kind == TermNode::Kind::Ident &&
       t.children[0].name == "And.intro")) {
    std::vector<const TermNode*> elems;
    if (t.kind == TermNode::Kind::Anon) {
      for (const auto& c : t.children) elems.push_back(&c);
    } else {
      for (size_t i = 1; i < t.children.size(); ++i) elems.push_back(&t.children[i]);
    }
    if (elems.empty()) throw ElabFail{"empty anonymous constructor"};
    ExprPtr want = expected;
    for (size_t i = 0; i + 1 < elems.size(); ++i) {
      if (!want || want->kind != ExprKind::Bin || want->op != Op::And) {
        throw ElabFail{"type mismatch\n  anonymous constructor\nis expected to have type\n  " +
                       print(expected)};
      }
      check_term(*elems[i], want->lhs, ctx);
      want = want->rhs;
    }
    check_term(*elems.back(), want, ctx);
    return;
  }
  ExprPtr got = infer_term(t, ctx);
  if (!equal(got, expected)) {
    throw ElabFail{"type mismatch\n  " + t.source + "\nhas type\n  " + print(got) +
                   "\nbut is expected to have type\n  " + print(expected)};
  }
}

ExprPtr infer_term(const TermNode& t, const ElabContext& ctx) {
  switch (t.kind) {
    case TermNode::Kind::Ident: {
      if (t.name == "And.left" || t.name == "And.right" || t.name == "And.intro") {
        throw ElabFail{"'" + t.name + "' must be applied to arguments"};
      }
      for (auto it = ctx.hyps->rbegin(); it != ctx.hyps->rend(); ++it) {
        if (it->name == t.name) {
          if (is_value_type(it->type)) {
            throw ElabFail{"type mismatch\n  " + t.name + "\nhas type\n  " + print(it->type)};
          }
          return it->type;
        }
      }
      auto g = ctx.env->find(t.name);
      if (g != ctx.env->end()) {
        if (g->second.empty()) {
          throw ElabFail{"'" + t.name + "' takes arguments that cannot be inferred here"};
        }
        return parse_expr(g->second);
      }
      throw ElabFail{"unknown identifier '" + t.name + "'"};
    }
    case TermNode::Kind::Proj: {
      ExprPtr inner = infer_term(t.children[0], ctx);
      if (inner->kind != ExprKind::Bin || inner->op != Op::And) {
        throw ElabFail{"type mismatch\n  projection applied to non-conjunction of type\n  " +
                       print(inner)};
      }
      return t.proj == 1 ? inner->lhs : inner->rhs;
    }
    case TermNode::Kind::Anon:
      throw ElabFail{"cannot infer the type of an anonymous constructor here"};
    case TermNode::Kind::App: {
      const TermNode& head = t.children[0];
      if (head.kind == TermNode::Kind::Ident &&
          (head.name == "And.left" || head.name == "And.right")) {
        if (t.children.size() != 2) throw ElabFail{"'" + head.name + "' expects one argument"};
        ExprPtr inner = infer_term(t.children[1], ctx);
        if (inner->kind != ExprKind::Bin || inner->op != Op::And) {
          throw ElabFail{"type mismatch\n  " + head.name + " applied to non-conjunction"};
        }
        return head.name == "And.left" ? inner->lhs : inner->rhs;
      }
      ExprPtr fn_type = infer_term(head, ctx);
      for (size_t i = 1; i < t.children.size(); ++i) {
        if (fn_type->kind != ExprKind::Bin || fn_type->op != Op::Imp) {
          throw ElabFail{"function expected at\n  " + head.source +
                         "\nterm has type\n  " + print(fn_type)};
        }
        check_term(t.children[i], fn_type->lhs, ctx);
        fn_type = fn_type->rhs;
      }
      return fn_type;
    }
  }
  throw ElabFail{"malformed term"};
}

TermNode parse_term_text(const std::string& text) {
  std::vector<Token> toks = lex(text);
  TermParser p{toks};
  TermNode t = p.parse_term();
  if (p.peek().kind != TokKind::End) {
    throw ElabFail{"unexpected token '" + p.peek().text + "' after term"};
  }
  t.source = text;
  return t;
}

// ---------------------------------------------------------------------------
// Tactic engine
// ---------------------------------------------------------------------------

struct BlockNode {
  int line = 1;  // 1-based source line
  int indent = 0;
  std::string text;  // stripped tactic text
  std::vector<BlockNode> children;
};

struct TacticFail {
  std::string message;
  int line = 0;  // filled in by run_node when known
};

struct DeclState {
  std::vector<Goal> goals;
  CheckOutcome* out = nullptr;
  const Env* env = nullptr;
  bool used_sorry = false;
};

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool starts_word(const std::string& s, const std::string& w) {
  if (s.compare(0, w.size(), w) != 0) return false;
  if (s.size() == w.size()) return true;
  char c = s[w.size()];
  return !(std::isalnum(static_cast<unsigned char>(c)) || c == '_');
}

void run_block(const std::vector<BlockNode>& nodes, DeclState& state);

ElabContext elab_ctx(const DeclState& state, const Goal& goal) {
  return ElabContext{&goal.hyps, state.env};
}

bool try_assumption(const DeclState& state, const Goal& goal) {
  (void)state;
  for (const auto& h : goal.hyps) {
    if (!is_value_type(h.type) && equal(h.type, goal.target)) return true;
  }
  return false;
}

bool try_norm_num(const Goal& goal) {
  return eval_prop(goal.target) == Tri::T;
}

bool try_omega(const Goal& goal) {
  LinContext ctx = build_lin_context(goal.hyps);
  if (goal.target->kind == ExprKind::Bin &&
      (goal.target->op == Op::Imp || goal.target->op == Op::Or)) {
    return false;
  }
  return linear_prove(ctx, goal.target);
}

bool try_ring(const Goal& goal) {
  if (goal.target->kind != ExprKind::Bin || goal.target->op != Op::Eq) return false;
  auto l = poly_of(goal.target->lhs);
  auto r = poly_of(goal.target->rhs);
  return l && r && *l == *r;
}

bool try_simp(const DeclState& state, const Goal& goal) {
  if (goal.target->kind == ExprKind::TrueK) return true;
  if (goal.target->kind == ExprKind::Bin && goal.target->op == Op::Eq &&
      equal(goal.target->lhs, goal.target->rhs))
    return true;
  if (eval_prop(goal.target) == Tri::T) return true;
  return try_assumption(state, goal);
}

// Single tactic applied to the first goal. Throws TacticFail on failure.
void apply_tactic(const BlockNode& node, const std::string& tac_text, DeclState& state) {
  std::string text = strip(tac_text);
  if (text.empty()) return;

  if (starts_word(text, "sleep")) {
    long ms = std::strtol(text.substr(5).c_str(), nullptr, 10);
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    return;
  }
  if (starts_word(text, "skip")) return;

  if (starts_word(text, "all_goals")) {
    std::string inner = strip(text.substr(9));
    std::vector<Goal> pending = std::move(state.goals);
    state.goals.clear();
    for (auto& g : pending) {
      std::vector<Goal> solo{std::move(g)};
      std::vector<Goal> saved = std::move(state.goals);
      state.goals = std::move(solo);
      apply_tactic(node, inner, state);
      for (auto& ng : state.goals) saved.push_back(std::move(ng));
      state.goals = std::move(saved);
    }
    return;
  }

  if (state.goals.empty()) throw TacticFail{"no goals"};
  Goal goal = std::move(state.goals.front());
  state.goals.erase(state.goals.begin());
  auto close = [&] { /* goal dropped */ };
  auto replace = [&](std::vector<Goal> gs) {
    state.goals.insert(state.goals.begin(), std::make_move_iterator(gs.begin()),
                       std::make_move_iterator(gs.end()));
  };
  auto keep = [&] { state.goals.insert(state.goals.begin(), std::move(goal)); };

  try {
    if (starts_word(text, "sorry")) {
      state.out->sorries.push_back({node.line, node.indent, pretty_goal(goal)});
      state.used_sorry = true;
      close();
      return;
    }
    if (starts_word(text, "intro")) {
      std::vector<Token> toks = lex(text.substr(5));
      std::vector<std::string> names;
      for (const auto& t : toks) {
        if (t.kind == TokKind::Ident) names.push_back(t.text);
        else if (t.kind != TokKind::End) throw TacticFail{"intro expects identifiers"};
      }
      if (names.empty()) throw TacticFail{"intro expects identifiers"};
      for (const auto& n : names) {
        if (goal.target->kind != ExprKind::Bin || goal.target->op != Op::Imp) {
          throw TacticFail{"tactic 'intro' failed, goal is not an implication"};
        }
        goal.hyps.push_back({n, goal.target->lhs});
        goal.target = goal.target->rhs;
      }
      replace({std::move(goal)});
      return;
    }
    if (starts_word(text, "exact?")) {
      if (try_assumption(state, goal)) { close(); return; }
      throw TacticFail{"exact? could not close the goal"};
    }
    if (starts_word(text, "exact")) {
      TermNode term = parse_term_text(strip(text.substr(5)));
      check_term(term, goal.target, elab_ctx(state, goal));
      close();
      return;
    }
    if (starts_word(text, "apply")) {
      TermNode term = parse_term_text(strip(text.substr(5)));
      ExprPtr ty = infer_term(term, elab_ctx(state, goal));
      std::vector<ExprPtr> domains;
      ExprPtr cur = ty;
      for (;;) {
        if (equal(cur, goal.target)) {
          std::vector<Goal> subgoals;
          for (const auto& d : domains) subgoals.push_back({goal.hyps, d});
          replace(std::move(subgoals));
          return;
        }
        if (cur->kind == ExprKind::Bin && cur->op == Op::Imp) {
          domains.push_back(cur->lhs);
          cur = cur->rhs;
          continue;
        }
        throw TacticFail{"type mismatch\n  " + term.source + "\nhas type\n  " + print(ty) +
                         "\nbut is expected to have type\n  " + print(goal.target)};
      }
    }
    if (starts_word(text, "constructor")) {
      if (goal.target->kind == ExprKind::Bin && goal.target->op == Op::And) {
        std::vector<Goal> gs;
        gs.push_back({goal.hyps, goal.target->lhs});
        gs.push_back({goal.hyps, goal.target->rhs});
        replace(std::move(gs));
        return;
      }
      throw TacticFail{"constructor failed, goal is not a structure"};
    }
    if (starts_word(text, "exfalso")) {
      goal.target = Expr::truth(false);
      replace({std::move(goal)});
      return;
    }
    if (starts_word(text, "have")) {
      // have NAME : TYPE := by TAC | := by <block> | := TERM
      std::string rest = strip(text.substr(4));
      std::string name = "this";
      size_t pos = 0;
      if (!rest.empty() && rest[0] != ':') {
        while (pos < rest.size() && rest[pos] != ' ' && rest[pos] != ':') ++pos;
        name = rest.substr(0, pos);
      }
      size_t colon = rest.find(':', pos);
      if (colon == std::string::npos || (colon + 1 < rest.size() && rest[colon + 1] == '=')) {
        throw TacticFail{"have requires a type ascription"};
      }
      size_t assign = rest.find(":=", colon);
      std::string type_text =
          assign == std::string::npos ? rest.substr(colon + 1) : rest.substr(colon + 1, assign - colon - 1);
      ExprPtr ty;
      try {
        ty = parse_expr(strip(type_text));
      } catch (const ParseFail& pf) {
        throw TacticFail{pf.message};
      }
      if (assign == std::string::npos) {
        throw TacticFail{"have without ':=' is not supported"};
      }
      std::string rhs = strip(rest.substr(assign + 2));
      if (rhs == "by") {
        if (node.children.empty()) {
          throw TacticFail{"have block has no proof"};
        }
        DeclState sub_state;
        sub_state.goals = {Goal{goal.hyps, ty}};
        sub_state.out = state.out;
        sub_state.env = state.env;
        run_block(node.children, sub_state);
        state.used_sorry = state.used_sorry || sub_state.used_sorry;
        if (!sub_state.goals.empty()) {
          std::string msg = "unsolved goals";
          for (const auto& g : sub_state.goals) {
            msg += '\n';
            msg += pretty_goal(g);
          }
          throw TacticFail{msg};
        }
      } else if (rhs.compare(0, 3, "by ") == 0) {
        DeclState sub_state;
        sub_state.goals = {Goal{goal.hyps, ty}};
        sub_state.out = state.out;
        sub_state.env = state.env;
        BlockNode inline_node = node;
        inline_node.children.clear();
        apply_tactic(inline_node, strip(rhs.substr(3)), sub_state);
        state.used_sorry = state.used_sorry || sub_state.used_sorry;
        if (!sub_state.goals.empty()) {
          std::string msg = "unsolved goals";
          for (const auto& g : sub_state.goals) {
            msg += '\n';
            msg += pretty_goal(g);
          }
          throw TacticFail{msg};
        }
      } else {
        TermNode term = parse_term_text(rhs);
        check_term(term, ty, elab_ctx(state, goal));
      }
      goal.hyps.push_back({name, ty});
      replace({std::move(goal)});
      return;
    }
    if (starts_word(text, "norm_num")) {
      if (try_norm_num(goal)) { close(); return; }
      throw TacticFail{"norm_num failed to close the goal"};
    }
    if (starts_word(text, "norm_cast")) {
      if (try_norm_num(goal) || (goal.target->kind == ExprKind::Bin &&
                                 goal.target->op == Op::Eq &&
                                 equal(goal.target->lhs, goal.target->rhs))) {
        close();
        return;
      }
      throw TacticFail{"norm_cast failed to close the goal"};
    }
    if (starts_word(text, "omega")) {
      if (try_omega(goal)) { close(); return; }
      throw TacticFail{"omega could not prove the goal"};
    }
    if (starts_word(text, "linarith")) {
      if (try_omega(goal)) { close(); return; }
      throw TacticFail{"linarith failed to find a contradiction"};
    }
    if (starts_word(text, "ring_nf") || starts_word(text, "ring")) {
      if (try_ring(goal)) { close(); return; }
      throw TacticFail{"ring failed to prove the equality"};
    }
    if (starts_word(text, "rfl")) {
      if ((goal.target->kind == ExprKind::Bin && goal.target->op == Op::Eq &&
           equal(goal.target->lhs, goal.target->rhs)) ||
          try_ring(goal) || try_norm_num(goal)) {
        close();
        return;
      }
      throw TacticFail{"rfl failed, the two sides are not definitionally equal"};
    }
    if (starts_word(text, "simp")) {
      if (try_simp(state, goal)) { close(); return; }
      throw TacticFail{"simp made no progress"};
    }
    if (starts_word(text, "assumption")) {
      if (try_assumption(state, goal)) { close(); return; }
      throw TacticFail{"assumption failed"};
    }
    if (starts_word(text, "trivial")) {
      if (goal.target->kind == ExprKind::TrueK || try_assumption(state, goal) ||
          (goal.target->kind == ExprKind::Bin && goal.target->op == Op::Eq &&
           equal(goal.target->lhs, goal.target->rhs))) {
        close();
        return;
      }
      throw TacticFail{"trivial failed to close the goal"};
    }
    if (starts_word(text, "hint")) {
      if (try_assumption(state, goal) || try_norm_num(goal) || try_omega(goal)) {
        close();
        return;
      }
      throw TacticFail{"hint found no applicable tactic"};
    }
    // Unknown tactic head: report it like an unresolved name.
    std::string head = text.substr(0, text.find(' '));
    throw TacticFail{"unknown identifier '" + head + "'"};
  } catch (const ElabFail& e) {
    keep();
    throw TacticFail{e.message};
  } catch (const ParseFail& e) {
    keep();
    throw TacticFail{e.message};
  } catch (const TacticFail&) {
    keep();
    throw;
  }
}

// Splits a line on top-level `;` / `<;>` into (combinator, tactic) stages.
struct Stage {
  bool all_goals = false;  // true when introduced by <;>
  std::string text;
};

std::vector<Stage> split_stages(const std::string& line) {
  std::vector<Stage> stages;
  int depth = 0;
  size_t start = 0;
  bool next_all = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (depth == 0 && line.compare(i, 3, "<;>") == 0) {
      stages.push_back({next_all, strip(line.substr(start, i - start))});
      next_all = true;
      i += 2;
      start = i + 1;
    } else if (depth == 0 && c == ';') {
      stages.push_back({next_all, strip(line.substr(start, i - start))});
      next_all = false;
      start = i + 1;
    }
  }
  stages.push_back({next_all, strip(line.substr(start))});
  return stages;
}

void run_node(const BlockNode& node, DeclState& state) {
  try {
    std::vector<Stage> stages = split_stages(node.text);
    for (const Stage& stage : stages) {
      if (stage.text.empty()) continue;
      if (stage.all_goals) {
        apply_tactic(node, "all_goals " + stage.text, state);
      } else {
        apply_tactic(node, stage.text, state);
      }
    }
  } catch (TacticFail& tf) {
    if (tf.line == 0) tf.line = node.line;
    throw;
  }
}

void run_block(const std::vector<BlockNode>& nodes, DeclState& state) {
  for (const auto& node : nodes) {
    run_node(node, state);
  }
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct DeclHeader {
  std::string keyword;
  std::string name;
  std::vector<Hypothesis> binders;
  ExprPtr target;
};

// Parses "theorem NAME (x : T) ... : GOAL := by" followed by an optional
// inline tactic. Returns the byte offset just past `by`.
DeclHeader parse_decl_header(const std::string& header, size_t* after_by) {
  DeclHeader decl;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < header.size() && (header[pos] == ' ' || header[pos] == '\n')) ++pos;
  };
  skip_ws();
  for (const char* kw : {"theorem", "lemma", "example"}) {
    size_t len = std::strlen(kw);
    if (header.compare(pos, len, kw) == 0 &&
        (pos + len >= header.size() || header[pos + len] == ' ')) {
      decl.keyword = kw;
      pos += len;
      break;
    }
  }
  if (decl.keyword.empty()) throw ParseFail{"expected a declaration"};
  skip_ws();
  if (decl.keyword != "example") {
    size_t start = pos;
    while (pos < header.size() && header[pos] != ' ' && header[pos] != ':' &&
           header[pos] != '(' && header[pos] != '{' && header[pos] != '[')
      ++pos;
    decl.name = header.substr(start, pos - start);
    if (decl.name.empty()) throw ParseFail{"missing declaration name"};
  }
  skip_ws();
  while (pos < header.size() &&
         (header[pos] == '(' || header[pos] == '{' || header[pos] == '[')) {
    char open = header[pos];
    char close = open == '(' ? ')' : open == '{' ? '}' : ']';
    int depth = 0;
    size_t start = pos;
    while (pos < header.size()) {
      if (header[pos] == open) ++depth;
      else if (header[pos] == close) {
        --depth;
        if (depth == 0) break;
      }
      ++pos;
    }
    if (pos >= header.size()) throw ParseFail{"unterminated binder group"};
    std::string inner = header.substr(start + 1, pos - start - 1);
    ++pos;
    size_t colon = inner.find(" : ");
    if (colon == std::string::npos) throw ParseFail{"binder group without type"};
    ExprPtr type = parse_expr(strip(inner.substr(colon + 3)));
    std::string names = strip(inner.substr(0, colon));
    size_t np = 0;
    while (np < names.size()) {
      size_t sp = names.find(' ', np);
      std::string n = sp == std::string::npos ? names.substr(np) : names.substr(np, sp - np);
      if (!n.empty()) decl.binders.push_back({n, type});
      if (sp == std::string::npos) break;
      np = sp + 1;
    }
    skip_ws();
  }
  if (pos >= header.size() || header[pos] != ':') throw ParseFail{"expected ':' before the goal"};
  ++pos;
  size_t assign = std::string::npos;
  {
    int depth = 0;
    for (size_t i = pos; i + 1 < header.size(); ++i) {
      char c = header[i];
      if (c == '(' || c == '[' || c == '{') ++depth;
      else if (c == ')' || c == ']' || c == '}') --depth;
      else if (depth == 0 && c == ':' && header[i + 1] == '=') {
        assign = i;
        break;
      }
    }
  }
  if (assign == std::string::npos) throw ParseFail{"expected ':=' after the goal"};
  decl.target = parse_expr(strip(header.substr(pos, assign - pos)));
  size_t by_pos = assign + 2;
  while (by_pos < header.size() && header[by_pos] == ' ') ++by_pos;
  if (header.compare(by_pos, 2, "by") != 0 ||
      (by_pos + 2 < header.size() && header[by_pos + 2] != ' ' && header[by_pos + 2] != '\n')) {
    throw ParseFail{"only tactic proofs (':= by') are supported"};
  }
  *after_by = by_pos + 2;
  return decl;
}

std::vector<BlockNode> build_tree(const std::vector<std::pair<int, std::string>>& lines,
                                  const std::vector<int>& numbers) {
  std::vector<BlockNode> root;
  std::vector<BlockNode*> stack;  // innermost last
  std::vector<int> indents;
  for (size_t i = 0; i < lines.size(); ++i) {
    int indent = lines[i].first;
    BlockNode node;
    node.line = numbers[i];
    node.indent = indent;
    node.text = lines[i].second;
    while (!stack.empty() && indent <= indents.back()) {
      stack.pop_back();
      indents.pop_back();
    }
    if (stack.empty()) {
      root.push_back(std::move(node));
      stack.push_back(&root.back());
      indents.push_back(indent);
    } else {
      stack.back()->children.push_back(std::move(node));
      stack.push_back(&stack.back()->children.back());
      indents.push_back(indent);
    }
  }
  return root;
}

}  // namespace

CheckOutcome check_source(const std::string& source, const Env& env) {
  CheckOutcome out;
  Env working = env;

  std::vector<std::string> lines;
  {
    size_t start = 0;
    while (start <= source.size()) {
      size_t nl = source.find('\n', start);
      if (nl == std::string::npos) {
        lines.push_back(source.substr(start));
        break;
      }
      lines.push_back(source.substr(start, nl - start));
      start = nl + 1;
    }
  }

  size_t i = 0;
  bool in_block_comment = false;
  while (i < lines.size()) {
    std::string stripped = strip(lines[i]);
    int line_no = static_cast<int>(i) + 1;
    if (in_block_comment) {
      if (stripped.find("-/") != std::string::npos) in_block_comment = false;
      ++i;
      continue;
    }
    if (stripped.empty() || stripped.compare(0, 2, "--") == 0) { ++i; continue; }
    if (stripped.compare(0, 2, "/-") == 0) {
      if (stripped.find("-/", 2) == std::string::npos) in_block_comment = true;
      ++i;
      continue;
    }
    if (stripped == "#crash") std::_Exit(3);
    if (starts_word(stripped, "import") || starts_word(stripped, "open") ||
        starts_word(stripped, "set_option") || starts_word(stripped, "section") ||
        starts_word(stripped, "end") || starts_word(stripped, "namespace") ||
        starts_word(stripped, "noncomputable")) {
      ++i;
      continue;
    }
    if (!starts_word(stripped, "theorem") && !starts_word(stripped, "lemma") &&
        !starts_word(stripped, "example")) {
      out.diags.push_back({"error", line_no, 0, "unexpected token '" +
                               stripped.substr(0, stripped.find(' ')) +
                               "'; expected a declaration"});
      ++i;
      continue;
    }

    // Accumulate the header until `:= by` appears at depth 0.
    std::string header = lines[i];
    size_t header_end = i;
    size_t after_by = 0;
    DeclHeader decl;
    bool ok = false;
    for (;;) {
      try {
        decl = parse_decl_header(header, &after_by);
        ok = true;
        break;
      } catch (const ParseFail& pf) {
        if (header_end + 1 < lines.size() && !strip(lines[header_end + 1]).empty() &&
            (lines[header_end + 1][0] == ' ' ||
             strip(lines[header_end + 1]).compare(0, 2, ":=") == 0 ||
             header.find(":=") == std::string::npos)) {
          ++header_end;
          header += '\n';
          header += lines[header_end];
          continue;
        }
        out.diags.push_back({"error", line_no, 0, pf.message});
        break;
      }
    }
    if (!ok) {
      // Skip the indented body of the malformed declaration.
      i = header_end + 1;
      while (i < lines.size() && (strip(lines[i]).empty() || lines[i][0] == ' ')) ++i;
      continue;
    }

    if (decl.keyword != "example" && working.count(decl.name)) {
      out.diags.push_back({"error", line_no, 0,
                           "'" + decl.name + "' has already been declared"});
      // Skip its body.
      i = header_end + 1;
      while (i < lines.size() && (strip(lines[i]).empty() || lines[i][0] == ' ')) ++i;
      continue;
    }

    // Collect body lines: inline tactic after `by`, then deeper-indented lines.
    std::vector<std::pair<int, std::string>> body;
    std::vector<int> numbers;
    std::string inline_tac = strip(header.substr(after_by));
    if (!inline_tac.empty()) {
      body.push_back({2, inline_tac});
      numbers.push_back(static_cast<int>(header_end) + 1);
    }
    i = header_end + 1;
    bool body_comment = false;
    while (i < lines.size()) {
      const std::string& raw = lines[i];
      std::string s = strip(raw);
      if (s.empty()) { ++i; continue; }
      if (raw[0] != ' ') break;
      if (body_comment) {
        if (s.find("-/") != std::string::npos) body_comment = false;
        ++i;
        continue;
      }
      if (s.compare(0, 2, "--") == 0) { ++i; continue; }
      if (s.compare(0, 2, "/-") == 0) {
        if (s.find("-/", 2) == std::string::npos) body_comment = true;
        ++i;
        continue;
      }
      int indent = 0;
      while (indent < static_cast<int>(raw.size()) && raw[indent] == ' ') ++indent;
      body.push_back({indent, s});
      numbers.push_back(static_cast<int>(i) + 1);
      ++i;
    }

    DeclState state;
    state.out = &out;
    state.env = &working;
    state.goals = {Goal{decl.binders, decl.target}};
    std::vector<BlockNode> tree = build_tree(body, numbers);
    bool failed = false;
    try {
      run_block(tree, state);
    } catch (const TacticFail& tf) {
      failed = true;
      out.diags.push_back({"error", tf.line > 0 ? tf.line : line_no, 0, tf.message});
    }
    if (!failed && !state.goals.empty()) {
      std::string msg = "unsolved goals";
      for (const auto& g : state.goals) {
        msg += '\n';
        msg += pretty_goal(g);
      }
      out.diags.push_back({"error", line_no, 0, msg});
    }
    if (state.used_sorry) {
      out.diags.push_back({"warning", line_no, 0, "declaration uses 'sorry'"});
    }
    if (decl.keyword != "example") {
      std::string stored = decl.binders.empty() ? print(decl.target) : "";
      working[decl.name] = stored;
      out.declared.emplace_back(decl.name, stored);
    }
  }
  return out;
}

}  // namespace minilean
