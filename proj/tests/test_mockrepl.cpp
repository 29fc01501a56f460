#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Adversarial checks of the bundled REPL stand-in, driven over the real wire
// protocol. If the oracle is wrong, everything downstream is wrong.

#include "fixtures.hpp"
#include "lemmaforge/repl_bridge.hpp"

using namespace lemmaforge;

namespace {

VerifyStatus check(ReplPool& pool, const std::string& body) {
  OracleRequest req;
  req.source_text = body;
  req.timeout_s = 10.0;
  return pool.verify(req).status;
}

}  // namespace

TEST_CASE("linear arithmetic decisions") {
  ReplPool pool(fixtures::pool_config(2));

  // Provable.
  CHECK(check(pool, "theorem a1 (a b : ℤ) (h1 : a ≤ b) (h2 : b ≤ a) : a = b := by"
                    "\n  omega\n") == VerifyStatus::Proved);
  CHECK(check(pool, "theorem a2 (a b c : ℤ) (h1 : a < b) (h2 : b < c) : a + 2 ≤ c := by"
                    "\n  omega\n") == VerifyStatus::Proved);
  CHECK(check(pool, "theorem a3 (x : ℕ) : 0 ≤ x := by\n  omega\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem a4 (a : ℤ) (h : 2 * a = 6) : a = 3 := by\n  omega\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem a5 (a b : ℤ) (h : a < b) : a ≠ b := by\n  omega\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem a6 (p : ℕ) (h : 0 < p ∧ p < 2) : p = 1 := by\n  omega\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem a7 (x y : ℕ) (h1 : x + y ≤ 4) (h2 : 2 ≤ x) : "
                    "y ≤ 2 := by\n  linarith\n") == VerifyStatus::Proved);

  // Must not be provable.
  CHECK(check(pool, "theorem b1 (a : ℤ) : 0 ≤ a := by\n  omega\n") ==
        VerifyStatus::Failed);
  CHECK(check(pool, "theorem b2 (x : ℕ) : 1 ≤ x := by\n  omega\n") ==
        VerifyStatus::Failed);
  CHECK(check(pool, "theorem b3 (a b : ℤ) (h : a ≤ b) : a = b := by\n  omega\n") ==
        VerifyStatus::Failed);
  CHECK(check(pool, "theorem b4 (a b : ℤ) (h : a * b = 6) : a = 2 := by\n  omega\n") ==
        VerifyStatus::Failed);  // nonlinear hypothesis is out of scope
}

TEST_CASE("polynomial identities") {
  ReplPool pool(fixtures::pool_config(2));
  CHECK(check(pool, "theorem r1 (a b : ℤ) : (a + b) ^ 2 = a ^ 2 + 2 * a * b + b ^ 2 := by"
                    "\n  ring\n") == VerifyStatus::Proved);
  CHECK(check(pool, "theorem r2 (x y : ℤ) : (x - y) * (x + y) = x ^ 2 - y ^ 2 := by"
                    "\n  ring\n") == VerifyStatus::Proved);
  CHECK(check(pool, "theorem r3 (a b : ℤ) : (a + b) ^ 2 = a ^ 2 + b ^ 2 := by\n  ring\n") ==
        VerifyStatus::Failed);
}

TEST_CASE("ground arithmetic") {
  ReplPool pool(fixtures::pool_config(2));
  CHECK(check(pool, "example : 2 ^ 10 = 1024 := by norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool, "example : 11 % 4 = 3 := by norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool, "example : 5 ∣ 35 := by norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool, "example : 5 ∣ 36 := by norm_num\n") == VerifyStatus::Failed);
  CHECK(check(pool, "example : 17 / 5 = 3 := by norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool, "example : ¬(3 < 2) := by norm_num\n") == VerifyStatus::Proved);
}

TEST_CASE("term elaboration") {
  ReplPool pool(fixtures::pool_config(2));
  CHECK(check(pool, "theorem e1 (h : 0 < 1 ∧ 0 < 2) : 0 < 2 := by\n  exact h.2\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem e2 (h : 0 < 1 ∧ 0 < 2) : 0 < 1 := by\n  exact And.left h\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool,
              "theorem e3 (f : 0 < 1 → 0 < 2 → 0 < 9) : 0 < 9 := by\n"
              "  apply f\n  norm_num\n  norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool,
              "theorem e4 (f : 0 < 1 ∧ 0 < 2 → 0 < 9) : 0 < 9 := by\n"
              "  exact f ⟨by norm_num, by norm_num⟩\n") == VerifyStatus::Failed);
  // (`by` inside anonymous constructors is beyond the fragment: must fail,
  // not crash, and must not prove.)
  CHECK(check(pool, "theorem e5 (h : 0 < 1) : 0 < 2 := by\n  exact h\n") ==
        VerifyStatus::Failed);

  SUBCASE("later bindings shadow earlier ones") {
    CHECK(check(pool,
                "theorem e6 (h : 0 < 1) : 0 < 2 := by\n"
                "  have h : 0 < 2 := by norm_num\n"
                "  exact h\n") == VerifyStatus::Proved);
  }
}

TEST_CASE("structural tactics and failure modes") {
  ReplPool pool(fixtures::pool_config(2));
  CHECK(check(pool,
              "theorem s1 : 0 ≤ 1 ∧ 0 ≤ 2 := by\n"
              "  constructor\n  norm_num\n  norm_num\n") == VerifyStatus::Proved);
  CHECK(check(pool, "theorem s2 : 0 ≤ 1 := by\n  constructor\n") == VerifyStatus::Failed);
  CHECK(check(pool, "theorem s3 : True := by\n  trivial\n  trivial\n") ==
        VerifyStatus::Failed);  // "no goals" for the second tactic
  CHECK(check(pool, "theorem s4 : 0 ≤ 1 ∧ 0 ≤ 2 := by\n  constructor <;> norm_num\n") ==
        VerifyStatus::Proved);
  CHECK(check(pool, "theorem s5 : 0 ≤ 1 := by\n  norm_num ; skip\n") ==
        VerifyStatus::Proved);  // skip is a pure no-op, legal with no goals
  CHECK(check(pool, "theorem s5b : 0 ≤ 1 := by\n  norm_num ; norm_num\n") ==
        VerifyStatus::Failed);  // goal-consuming tactics run out of goals
  CHECK(check(pool, "theorem s6 (x : ℕ) : 0 ≤ x → 0 ≤ x + 1 := by\n"
                    "  intro hx\n  omega\n") == VerifyStatus::Proved);
}

TEST_CASE("diagnostics carry usable positions and names") {
  ReplPool pool(fixtures::pool_config(1));
  OracleRequest req;
  req.source_text =
      "theorem d1 : 0 ≤ 1 := by\n  skip\n  exact missing_thing\n";
  VerificationResult r = pool.verify(req);
  REQUIRE(r.status == VerifyStatus::Failed);
  REQUIRE_FALSE(r.messages.empty());
  CHECK(r.messages[0].line == 3);
  CHECK(r.messages[0].text.find("unknown identifier 'missing_thing'") != std::string::npos);
}
