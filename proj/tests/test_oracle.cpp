#include <random>

#include "doctest.h"
#include "stacklin/generate.hpp"
#include "stacklin/linearizer.hpp"
#include "stacklin/oracle.hpp"
#include "support.hpp"

using namespace stacklin;
using testing::fixture;
using testing::parse;

TEST_CASE("sequential stack replay") {
  const History h = parse(
      "inv 1 t0 push a\nret 1 t0\ninv 2 t1 push b\nret 2 t1\ninv 3 t2 pop\nret 3 t2 b\ninv 4 t3 pop\nret 4 t3 a\n");
  CHECK(is_legal_sequential(h, std::vector<OpId>{1, 2, 3, 4}));
  CHECK_FALSE(is_legal_sequential(h, std::vector<OpId>{1, 2, 4}));
  CHECK(is_legal_sequential(fixture("five_thread_run.hist"), std::vector<OpId>{1, 2, 3, 4, 5, 6}));

  const History e = parse("inv 1 t0 pop\nret 1 t0 empty\ninv 2 t0 push a\nret 2 t0\n");
  CHECK(is_legal_sequential(e, std::vector<OpId>{1, 2}));
  CHECK_FALSE(is_legal_sequential(e, std::vector<OpId>{2, 1}));

  SeqStackState s;
  CHECK_FALSE(s.pop());
  s.push("x");
  s.push("y");
  CHECK(s.pop() == "y");
  CHECK(s.contents() == std::vector<std::string>{"x"});
}

TEST_CASE("oracle verdicts on small shapes") {
  CHECK(oracle_check(fixture("overlap_pop_x.hist")).linearizable);
  CHECK(oracle_check(fixture("overlap_pop_y.hist")).linearizable);
  const Verdict fifo =
      oracle_check(parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 push b\nret 2 t0\ninv 3 t0 pop\nret 3 t0 a\n"));
  REQUIRE_FALSE(fifo.linearizable);
  CHECK(fifo.violation->condition == Condition::NoLinearization);

  const Verdict run5 = oracle_check(fixture("five_thread_run.hist"));
  REQUIRE(run5.linearizable);
  CHECK(certify_witness(fixture("five_thread_run.hist"), run5.witness));
  CHECK(oracle_check(History{}).linearizable);
}

TEST_CASE("memoized and plain search agree, and witnesses certify") {
  std::mt19937_64 rng(31);
  std::size_t yes = 0;
  for (int i = 0; i < 3000; ++i) {
    SyntheticOptions o;
    o.ops = 1 + rng() % 6;
    const History h = random_history(rng, o);
    const Verdict plain = oracle_check(h, OracleOptions{12, false});
    const Verdict memo = oracle_check(h, OracleOptions{12, true});
    REQUIRE(plain.linearizable == memo.linearizable);
    CHECK(plain.witness == memo.witness);
    if (plain.linearizable) {
      ++yes;
      CHECK(certify_witness(h, plain.witness));
    }
  }
  CHECK(yes > 500);
}

TEST_CASE("oracle refuses histories above its bound") {
  std::string text;
  for (int i = 1; i <= 13; ++i) {
    text += "inv " + std::to_string(i) + " t0 push v" + std::to_string(i) + "\nret " + std::to_string(i) + " t0\n";
  }
  const History h = parse(text);
  CHECK_THROWS_AS(oracle_check(h), SearchBoundExceeded);
  CHECK(oracle_check(h, OracleOptions{13, true}).linearizable);
  CHECK(oracle_check(h.prefix(12)).linearizable);
}
