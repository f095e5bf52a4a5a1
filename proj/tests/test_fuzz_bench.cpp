#include <random>

#include "doctest.h"
#include "stacklin/bench.hpp"
#include "stacklin/fuzz.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "support.hpp"

using namespace stacklin;
using testing::fixture;
using testing::parse;

TEST_CASE("fuzz: zero trials gives an empty report") {
  FuzzConfig c;
  c.trials = 0;
  const FuzzReport r = fuzz(c);
  CHECK(r.trials == 0);
  CHECK(r.agreements == 0);
  CHECK(r.disagreements == 0);
  CHECK(r.violations.empty());
  CHECK(r.persisted.empty());
}

TEST_CASE("fuzz: size bound is enforced") {
  FuzzConfig c;
  c.max_ops = kMaxFuzzOps + 1;
  CHECK_THROWS_AS(fuzz(c), std::invalid_argument);
}

TEST_CASE("fuzz: injected inversion is rejected by both deciders") {
  std::mt19937_64 rng(1);
  for (const char* name : {"five_thread_run.hist", "overlap_pop_x.hist", "overlap_pop_y.hist"}) {
    const auto h = mutate(fixture(name), Mutation::InjectInversion, rng);
    REQUIRE(h);
    CHECK(h->size() == fixture(name).size() + 3);
    CHECK_FALSE(oracle_check(*h).linearizable);
    PipelineOptions o;
    const Verdict v = run_pipeline(*h, o).verdict;
    REQUIRE_FALSE(v.linearizable);
    CHECK(v.violation->condition == Condition::Condition1);
    if (!h->removal_order().empty()) {
      o.pop_order = PopOrderSource::Recorded;
      CHECK_FALSE(run_pipeline(*h, o).verdict.linearizable);
    }
  }
  const auto lone = mutate(History{}, Mutation::InjectInversion, rng);
  REQUIRE(lone);
  CHECK_FALSE(oracle_check(*lone).linearizable);
}

TEST_CASE("fuzz: other mutations change the history or report that they cannot") {
  std::mt19937_64 rng(2);
  const History run5 = fixture("five_thread_run.hist");
  const auto swapped = mutate(run5, Mutation::ValueSwap, rng);
  REQUIRE(swapped);
  CHECK_FALSE(*swapped == run5);
  const auto shuffled = mutate(run5, Mutation::RankShuffle, rng);
  REQUIRE(shuffled);
  CHECK(shuffled->removal_order().size() == 3);

  const History one_pop = parse("inv 1 t0 push a\nret 1 t0\ninv 2 t0 pop\nret 2 t0 a\n");
  CHECK_FALSE(mutate(one_pop, Mutation::ValueSwap, rng));
  CHECK_FALSE(mutate(one_pop, Mutation::RankShuffle, rng));
}

TEST_CASE("fuzz: small campaigns agree and account for every trial") {
  for (bool m : {false, true}) {
    FuzzConfig c;
    c.trials = 1500;
    c.max_ops = 8;
    c.seed = 4;
    c.mutate = m;
    c.workers = 2;
    const FuzzReport r = fuzz(c);
    CHECK(r.trials == c.trials);
    CHECK(r.agreements + r.disagreements == r.trials);
    CHECK(r.disagreements == 0);
    CHECK(r.false_accepts == 0);
    CHECK(r.recorded > 0);
    CHECK(r.linearizable > 0);
    CHECK(r.linearizable < r.trials);
    if (m) CHECK(r.mutated > 0);
  }
}

TEST_CASE("fuzz: synthetic campaigns do not depend on the worker count") {
  FuzzConfig c;
  c.trials = 800;
  c.seed = 9;
  c.mutate = true;
  c.recorded_share = 0;
  c.workers = 1;
  const FuzzReport one = fuzz(c);
  c.workers = 3;
  const FuzzReport three = fuzz(c);
  CHECK(one.linearizable == three.linearizable);
  CHECK(one.violations == three.violations);
  CHECK(one.mutations == three.mutations);
  CHECK(one.recorded == 0);
}

TEST_CASE("bench: one row per size") {
  BenchOptions o;
  o.sizes = {8};
  o.repeats = 1;
  const auto rows = bench(o);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].family == "recorded");
  CHECK(rows[0].ops <= 8);
  CHECK(rows[0].checker_linearizable);
  REQUIRE(rows[0].oracle_linearizable);
  CHECK(*rows[0].oracle_linearizable);
}

TEST_CASE("bench: oracle skipped above its bound, table marks it") {
  BenchOptions o;
  o.family = BenchFamily::Inverted;
  o.sizes = {6, 40};
  o.repeats = 1;
  const auto rows = bench(o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].oracle_ms);
  CHECK_FALSE(rows[1].oracle_ms);
  CHECK_FALSE(rows[1].checker_linearizable);
  const std::string tsv = bench_tsv(rows);
  CHECK(tsv.rfind("family\tops\tchecker_ms\toracle_ms\tchecker_verdict\toracle_verdict\n", 0) == 0);
  CHECK(tsv.find("SKIPPED") != std::string::npos);
}

TEST_CASE("bench: concurrent pushes are rejected by both and sizes are validated") {
  BenchOptions o;
  o.family = BenchFamily::ConcurrentPushes;
  o.sizes = {5, 9};
  o.repeats = 1;
  for (const BenchRow& r : bench(o)) {
    CHECK_FALSE(r.checker_linearizable);
    REQUIRE(r.oracle_linearizable);
    CHECK_FALSE(*r.oracle_linearizable);
  }
  o.sizes = {9, 5};
  CHECK_THROWS_AS(bench(o), std::invalid_argument);
  o.sizes = {};
  CHECK_THROWS_AS(bench(o), std::invalid_argument);
  CHECK(parse_bench_family("concurrent-pushes") == BenchFamily::ConcurrentPushes);
  CHECK_FALSE(parse_bench_family("nope"));
}
