#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "stacklin/checker.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "support.hpp"

using namespace stacklin;
using testing::fixture;
using testing::parse;

namespace {

MatchMap match_of(const History& h) { return std::get<MatchMap>(derive_match(h)); }

PopOrder order(std::initializer_list<OpId> pops) { return PopOrder{std::vector<OpId>(pops)}; }

// push(a) -> push(b) -> pop returning a
const char* kFifo = "inv 1 t0 push a\nret 1 t0\ninv 2 t0 push b\nret 2 t0\ninv 3 t0 pop\nret 3 t0 a\n";

// pop(EMPTY) overlaps push(b); push(b) precedes push(a); pop(a) precedes nothing.
const char* kClause2b =
    "inv 4 t3 pop\ninv 1 t0 push b\nret 1 t0\ninv 2 t1 push a\nret 2 t1\n"
    "inv 3 t2 pop\nret 3 t2 a\nret 4 t3 empty\n";

/// Brute force: some linear extension of happened-before is a legal stack
/// run whose pops appear exactly in `pops` order.
bool witness_with_order(const History& h, const std::vector<OpId>& pops) {
  std::vector<std::size_t> seq(h.size());
  std::iota(seq.begin(), seq.end(), 0);
  const HBRelation hb(h);
  do {
    if (!is_linear_extension(seq, hb) || !is_legal_sequential_indices(h, seq)) continue;
    std::vector<OpId> got;
    for (std::size_t i : seq) {
      if (h.op(i).is_pop()) got.push_back(h.op(i).id);
    }
    if (got == pops) return true;
  } while (std::next_permutation(seq.begin(), seq.end()));
  return false;
}

}  // namespace

TEST_CASE("pop order from removal ranks") {
  CHECK(pop_order_from_removals(fixture("five_thread_run.hist")) == order({5, 2, 6}));

  CHECK(pop_order_from_removals(parse("inv 1 t0 pop\nret 1 t0 empty\nrm 1 7\n")) == order({1}));

  const History swapped = parse("inv 1 t0 pop\nret 1 t0 empty\ninv 2 t0 pop\nret 2 t0 empty\nrm 1 2\nrm 2 1\n");
  try {
    pop_order_from_removals(swapped);
    FAIL("accepted");
  } catch (const PopOrderError& e) {
    CHECK(e.kind() == PopOrderErrorKind::NotALinearExtension);
  }

  const History missing = parse("inv 1 t0 pop\nret 1 t0 empty\ninv 2 t0 pop\nret 2 t0 empty\nrm 1 1\n");
  try {
    pop_order_from_removals(missing);
    FAIL("accepted");
  } catch (const PopOrderError& e) {
    CHECK(e.kind() == PopOrderErrorKind::MissingRemovalRank);
  }
}

TEST_CASE("validate_pop_order") {
  const History run5 = fixture("five_thread_run.hist");
  CHECK_FALSE(validate_pop_order(run5, order({5, 2, 6})));
  CHECK_FALSE(validate_pop_order(run5, order({2, 5, 6})));
  const auto missing = validate_pop_order(run5, order({5, 2}));
  REQUIRE(missing);
  CHECK(missing->condition == Condition::PopOrder);

  const History seq = parse("inv 1 t0 pop\nret 1 t0 empty\ninv 2 t0 pop\nret 2 t0 empty\n");
  REQUIRE(validate_pop_order(seq, order({2, 1})));
  CHECK(validate_pop_order(seq, order({2, 1}))->condition == Condition::PopOrder);
}

TEST_CASE("condition 1") {
  const History run5 = fixture("five_thread_run.hist");
  const MatchMap m5 = match_of(run5);
  for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(check_condition1(run5, m5, order({5, 2, 6}), i));

  const History fifo = parse(kFifo);
  const auto v = check_condition1(fifo, match_of(fifo), order({3}), 0);
  REQUIRE(v);
  CHECK(v->condition == Condition::Condition1);
  CHECK(v->pop_index == 0);
  CHECK(std::string(to_string(v->condition)) == "condition-1");

  // Only its own push precedes the pop.
  const History own = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\n");
  CHECK_FALSE(check_condition1(own, match_of(own), order({2}), 0));

  const History empty = parse("inv 1 t0 pop\nret 1 t0 empty\n");
  CHECK_THROWS_AS(check_condition1(empty, match_of(empty), order({1}), 0), std::invalid_argument);
}

TEST_CASE("condition 2") {
  const History drained = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\ninv 3 t0 pop\nret 3 t0 empty\n");
  CHECK_FALSE(check_condition2(drained, match_of(drained), order({2, 3}), 1));
  CHECK_THROWS_AS(check_condition2(drained, match_of(drained), order({2, 3}), 0), std::invalid_argument);

  const History leftover = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 empty\n");
  const auto a = check_condition2(leftover, match_of(leftover), order({2}), 0);
  REQUIRE(a);
  CHECK(a->condition == Condition::Condition2a);
  CHECK(std::string(to_string(a->condition)) == "condition-2a");

  const History b = parse(kClause2b);
  const auto vb = check_condition2(b, match_of(b), order({3, 4}), 1);
  REQUIRE(vb);
  CHECK(vb->condition == Condition::Condition2b);
  CHECK(vb->pop_index == 1);
  // No run keeps this pop order, though the other order has one.
  CHECK_FALSE(witness_with_order(b, {3, 4}));
  CHECK(witness_with_order(b, {4, 3}));
  CHECK_FALSE(check_conditions(b, match_of(b), order({4, 3})));
}

TEST_CASE("check: five-thread run with the recorded order gives the exact witness") {
  const History run5 = fixture("five_thread_run.hist");
  WitnessReport report;
  const Verdict v = check(run5, match_of(run5), order({5, 2, 6}), {}, &report);
  REQUIRE(v.linearizable);
  CHECK(v.witness == WitnessSequence{1, 2, 3, 4, 5, 6});
  CHECK(report.source == WitnessSource::PushesFirst);

  CheckOptions strict;
  strict.witness = WitnessStrategy::PushesFirst;
  CHECK(check(run5, match_of(run5), order({5, 2, 6}), strict).witness == WitnessSequence{1, 2, 3, 4, 5, 6});
}

TEST_CASE("check: trivial and canonical cases") {
  const Verdict empty = check(History{}, MatchMap{}, PopOrder{});
  CHECK(empty.linearizable);
  CHECK(empty.witness.empty());

  const History fifo = parse(kFifo);
  const Verdict v = check(fifo, match_of(fifo), order({3}));
  REQUIRE_FALSE(v.linearizable);
  CHECK(v.violation->condition == Condition::Condition1);

  const Verdict searched = check_searching(fifo, match_of(fifo));
  REQUIRE_FALSE(searched.linearizable);
  CHECK(searched.violation->condition == Condition::Condition1);
}

TEST_CASE("overlapping push variants are both linearizable") {
  for (const char* name : {"overlap_pop_x.hist", "overlap_pop_y.hist"}) {
    const History h = fixture(name);
    const PipelineResult r = run_pipeline(h);
    CHECK(r.verdict.linearizable);
    CHECK(certify_witness(h, r.verdict.witness));
    CHECK(oracle_check(h).linearizable);
  }
  CHECK(run_pipeline(fixture("overlap_pop_x.hist")).pairs.empty());
  CHECK(run_pipeline(fixture("overlap_pop_y.hist")).pairs.size() == 1);
}

TEST_CASE("regression: passing the conditions is not enough to accept") {
  // An EMPTY pop after a pop whose push was preceded by an unpopped push.
  const History empty_after = parse(
      "inv 1 t0 push v0\ninv 2 t1 push v1\nret 1 t0\ninv 3 t2 pop\nret 2 t1\ninv 4 t3 pop\n"
      "ret 3 t2 empty\nret 4 t3 v0\n");
  CHECK_FALSE(check_conditions(empty_after, match_of(empty_after), order({4, 3})));
  CHECK_FALSE(oracle_check(empty_after).linearizable);
  CHECK_FALSE(run_pipeline(empty_after).verdict.linearizable);

  // A chain of pushes that pairwise comparisons cannot see.
  const History chain = parse(
      "inv 1 t0 push v0\ninv 2 t1 push v1\nret 1 t0\ninv 3 t2 push v2\nret 2 t1\ninv 4 t3 pop\nret 3 t2\n"
      "inv 5 t4 pop\nret 5 t4 v1\ninv 6 t5 push v3\nret 4 t3 v0\nret 6 t5\n");
  CHECK_FALSE(check_conditions(chain, match_of(chain), order({4, 5}), ConditionRules::Strengthened));
  CHECK_FALSE(oracle_check(chain).linearizable);
  const Verdict v = run_pipeline(chain).verdict;
  REQUIRE_FALSE(v.linearizable);
  CHECK(v.violation->condition == Condition::NoLinearization);
}

TEST_CASE("stricter rules reject the five-thread run order that the construction reorders") {
  const History run5 = fixture("five_thread_run.hist");
  const MatchMap m = match_of(run5);
  const auto strict = check_conditions(run5, m, order({5, 2, 6}), ConditionRules::Strengthened);
  REQUIRE(strict);
  CHECK(strict->condition == Condition::Condition1);

  std::size_t moves = 0;
  const auto advanced = advance_pop_order(run5, m, order({5, 2, 6}), ConditionRules::Strengthened, &moves);
  REQUIRE(advanced);
  CHECK(moves >= 1);
  CHECK_FALSE(check_conditions(run5, m, *advanced, ConditionRules::Strengthened));
  CHECK(witness_with_order(run5, advanced->pops));
}

TEST_CASE("advance_pop_order leaves passing orders alone and gives up on other failures") {
  const History run5 = fixture("five_thread_run.hist");
  std::size_t moves = 7;
  const auto same = advance_pop_order(run5, match_of(run5), order({2, 5, 6}), ConditionRules::Strengthened, &moves);
  REQUIRE(same);
  CHECK(*same == order({2, 5, 6}));
  CHECK(moves == 0);

  const History fifo = parse(kFifo);
  CHECK_FALSE(advance_pop_order(fifo, match_of(fifo), order({3})));
}

TEST_CASE("search bound on pop count") {
  std::string text;
  for (int i = 1; i <= 12; ++i) {
    text += "inv " + std::to_string(i) + " t" + std::to_string(i) + " pop\n";
  }
  for (int i = 1; i <= 12; ++i) text += "ret " + std::to_string(i) + " t" + std::to_string(i) + " empty\n";
  const History h = parse(text);
  CheckOptions o;
  o.max_pops = 11;
  CHECK_THROWS_AS(check_searching(h, match_of(h), o), SearchBoundExceeded);
  o.max_pops = 12;
  CHECK(check_searching(h, match_of(h), o).linearizable);
}
