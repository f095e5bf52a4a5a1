#include <random>

#include "doctest.h"
#include "stacklin/generate.hpp"
#include "stacklin/matching.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/reduction.hpp"
#include "support.hpp"

using namespace stacklin;
using testing::fixture;
using testing::parse;

namespace {

MatchMap mm(std::map<OpId, std::optional<OpId>> m) { return MatchMap(std::move(m)); }

}  // namespace

TEST_CASE("derive_match on five-thread run") {
  const History h = fixture("five_thread_run.hist");
  const MatchResult r = derive_match(h);
  REQUIRE(std::holds_alternative<MatchMap>(r));
  const MatchMap expected(std::map<OpId, std::optional<OpId>>{{2, 1}, {5, 4}, {6, 3}});
  CHECK(std::get<MatchMap>(r) == expected);
}

TEST_CASE("derive_match: pushes only, unknown value, value returned twice") {
  const History pushes = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t1 push b\nret 2 t1\n");
  CHECK(std::get<MatchMap>(derive_match(pushes)).size() == 0);

  const History bogus = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 q\n");
  const MatchResult r1 = derive_match(bogus);
  REQUIRE(std::holds_alternative<Violation>(r1));
  CHECK(std::get<Violation>(r1).condition == Condition::MatchClause1);
  CHECK(std::string(to_string(std::get<Violation>(r1).condition)) == "match-clause-1");

  const History twice = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\ninv 3 t0 pop\nret 3 t0 a\n");
  const MatchResult r3 = derive_match(twice);
  REQUIRE(std::holds_alternative<Violation>(r3));
  CHECK(std::get<Violation>(r3).condition == Condition::MatchClause3);
}

TEST_CASE("validate_match: clauses and totality") {
  const History h = parse(
      "inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\ninv 3 t1 pop\nret 3 t1 empty\n");
  CHECK_FALSE(validate_match(h, mm({{2, 1}, {3, std::nullopt}})));

  auto two = validate_match(h, mm({{2, 1}, {3, 1}}));
  REQUIRE(two);
  CHECK(two->condition != Condition::MatchClause1);

  const History two_values = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\ninv 3 t0 pop\nret 3 t0 a\n");
  auto dup = validate_match(two_values, mm({{2, 1}, {3, 1}}));
  REQUIRE(dup);
  CHECK(dup->condition == Condition::MatchClause3);

  auto empty_mapped = validate_match(h, mm({{2, std::nullopt}, {3, std::nullopt}}));
  REQUIRE(empty_mapped);
  CHECK(empty_mapped->condition == Condition::MatchClause2);

  CHECK_THROWS_AS(validate_match(h, mm({{2, 1}})), std::invalid_argument);
  CHECK_THROWS_AS(validate_match(h, mm({{2, 1}, {3, std::nullopt}, {1, std::nullopt}})),
                  std::invalid_argument);
}

TEST_CASE("derive_match output always validates") {
  std::mt19937_64 rng(3);
  std::size_t derived = 0;
  for (int i = 0; i < 2000; ++i) {
    SyntheticOptions o;
    o.ops = 1 + rng() % 10;
    const History h = random_history(rng, o);
    const MatchResult r = derive_match(h);
    if (const auto* m = std::get_if<MatchMap>(&r)) {
      ++derived;
      REQUIRE_FALSE(validate_match(h, *m));
    }
  }
  CHECK(derived > 1000);
}

TEST_CASE("elimination pairs on overlapping push and sequential histories") {
  const History y = fixture("overlap_pop_y.hist");
  const MatchMap my = std::get<MatchMap>(derive_match(y));
  CHECK(find_elimination_pairs(y, my) == std::vector<EliminationPair>{{2, 3}});

  const History x = fixture("overlap_pop_x.hist");
  CHECK(find_elimination_pairs(x, std::get<MatchMap>(derive_match(x))).empty());

  const History seq = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\n");
  CHECK(find_elimination_pairs(seq, std::get<MatchMap>(derive_match(seq))).empty());
}

TEST_CASE("strip removes exactly the paired operations") {
  const History y = fixture("overlap_pop_y.hist");
  const History s = strip(y, {{2, 3}});
  REQUIRE(s.size() == 1);
  CHECK(s.op(0).id == 1);
  CHECK(s.op(0).value == "x");

  CHECK(strip(y, {}) == y);

  const History pair = parse("inv 1 t0 push a\ninv 2 t1 pop\nret 2 t1 a\nret 1 t0\n");
  CHECK(strip(pair, find_elimination_pairs(pair, std::get<MatchMap>(derive_match(pair)))).empty());
}

TEST_CASE("stripping elimination pairs never changes the oracle verdict") {
  std::mt19937_64 rng(17);
  std::size_t stripped = 0;
  for (int i = 0; i < 3000; ++i) {
    SyntheticOptions o;
    o.ops = 1 + rng() % 8;
    const History h = random_history(rng, o);
    const MatchResult r = derive_match(h);
    const auto* m = std::get_if<MatchMap>(&r);
    if (!m) continue;
    const auto pairs = find_elimination_pairs(h, *m);
    if (pairs.empty()) continue;
    ++stripped;
    REQUIRE(oracle_check(h).linearizable == oracle_check(strip(h, pairs)).linearizable);
  }
  CHECK(stripped > 200);
}
