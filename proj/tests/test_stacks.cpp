#include <algorithm>
#include <set>
#include <thread>

#include "doctest.h"
#include "stacklin/matching.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "stacklin/stacks/hsy_stack.hpp"
#include "stacklin/stacks/recorder.hpp"
#include "stacklin/stacks/treiber_stack.hpp"
#include "stacklin/stacks/ts_stack.hpp"

using namespace stacklin;
using namespace stacklin::stacks;

namespace {

PipelineResult check_recorded(const History& h, ConditionRules rules = ConditionRules::Stated) {
  PipelineOptions o;
  o.pop_order = PopOrderSource::Recorded;
  o.check.rules = rules;
  return run_pipeline(h, o);
}

OpId pop_returning(const History& h, const std::string& value) {
  for (const Operation& op : h.ops()) {
    if (op.is_pop() && !op.returns_empty && op.value == value) return op.id;
  }
  FAIL("no pop returned " << value);
  return 0;
}

}  // namespace

TEST_CASE("value tokens name thread and counter") {
  CHECK(value_name(make_value(0, 0)) == "t0v0");
  CHECK(value_name(make_value(3, 17)) == "t3v17");
  CHECK(make_value(0, 0) != 0);
}

TEST_CASE("timestamps: ordering, top and bottom") {
  const Timestamp a{1, 2}, b{3, 4}, overlap{2, 5};
  CHECK(ts_less(a, b));
  CHECK_FALSE(ts_less(b, a));
  CHECK_FALSE(ts_less(a, a));
  CHECK(incomparable(b, overlap));
  CHECK(ts_less(b, Timestamp::top()));
  CHECK_FALSE(ts_less(Timestamp::top(), b));
  CHECK_FALSE(ts_less(Timestamp::top(), Timestamp::top()));
  CHECK(ts_less(Timestamp::bottom(), a));
  CHECK(Timestamp::unpack(overlap.pack()) == overlap);
}

TEST_CASE("timestamps: sequential calls increase, overlapping calls can be incomparable") {
  IntervalClock clock;
  Timestamp prev = clock.generate();
  for (int i = 0; i < 10000; ++i) {
    const Timestamp next = clock.generate();
    REQUIRE(ts_less(prev, next));
    prev = next;
  }
  Timestamp inner;
  const Timestamp outer = clock.generate([&] { inner = clock.generate(); });
  CHECK(incomparable(outer, inner));
}

TEST_CASE("treiber: sequential semantics") {
  SeqClock clock;
  TreiberStack s(1, clock);
  CHECK_FALSE(s.pop(0).value);
  s.push(0, 10);
  s.push(0, 11);
  const PopResult r = s.pop(0);
  CHECK(r.value == 11u);
  CHECK_FALSE(r.eliminated);
  CHECK(r.stamp > 0);
  CHECK(s.pop(0).value == 10u);
  CHECK_FALSE(s.pop(0).value);
}

TEST_CASE("hsy: without contention it behaves as a plain stack") {
  SeqClock clock;
  HsyStack s(2, clock);
  for (Value v = 1; v <= 5; ++v) s.push(0, v);
  for (Value v = 5; v >= 1; --v) {
    const PopResult r = s.pop(1);
    CHECK(r.value == v);
    CHECK_FALSE(r.eliminated);
  }
  CHECK_FALSE(s.pop(0).value);
  CHECK(s.eliminations() == 0);
}

TEST_CASE("hsy: forced collision exchanges the value") {
  SeqClock clock;
  HsyStack s(2, clock, 1, 1000);
  s.set_fast_path(false);
  Recorder rec(s, clock);
  std::thread pusher([&] { rec.push(0, make_value(0, 0)); });
  PopResult r = rec.pop(1);
  pusher.join();
  CHECK(r.value == make_value(0, 0));
  CHECK(r.eliminated);
  CHECK(s.eliminations() == 1);

  const History h = rec.finish().history;
  const OpId pop = pop_returning(h, "t0v0");
  CHECK(h.eliminated().contains(pop));
  CHECK(h.removal_order().empty());
  const auto pairs = find_elimination_pairs(h, std::get<MatchMap>(derive_match(h)));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].pop == pop);
  CHECK(check_recorded(h).verdict.linearizable);
}

TEST_CASE("ts: sequential semantics") {
  SeqClock clock;
  TsStack s(2, clock);
  const PushResult a = s.push(0, 1);
  const PushResult b = s.push(0, 2);
  REQUIRE(a.timestamp);
  REQUIRE(b.timestamp);
  CHECK(ts_less(*a.timestamp, *b.timestamp));
  s.push(1, 3);
  CHECK(s.pop(0).value == 3u);
  CHECK(s.pop(1).value == 2u);
  CHECK(s.pop(1).value == 1u);
  const PopResult empty = s.pop(0);
  CHECK_FALSE(empty.value);
  CHECK(empty.attempts == 1);
  CHECK(empty.stamp > 0);
}

TEST_CASE("ts: a pop overlapping a later-stamped push takes the elimination branch") {
  SeqClock clock;
  TsStack s(2, clock);
  bool armed = true;
  s.set_probe([&](TsStack::Probe p, std::size_t pool) {
    if (armed && p == TsStack::Probe::ScanPool && pool == 1) {
      armed = false;
      s.push(1, 42);
    }
  });
  const PopResult r = s.pop(0);
  CHECK(r.value == 42u);
  CHECK(r.eliminated);
}

TEST_CASE("ts: losing the candidate to a racing pop forces a retry") {
  SeqClock clock;
  TsStack s(3, clock);
  s.push(0, 1);
  s.push(1, 2);
  bool armed = true;
  s.set_probe([&](TsStack::Probe p, std::size_t) {
    if (armed && p == TsStack::Probe::BeforeRemove) {
      armed = false;
      CHECK(s.pop(2).value == 2u);
    }
  });
  const PopResult r = s.pop(2);
  CHECK(r.value == 1u);
  CHECK(r.attempts == 2);
}

TEST_CASE("ts: an insert during the emptiness check forces a retry") {
  SeqClock clock;
  TsStack s(2, clock);
  bool armed = true;
  s.set_probe([&](TsStack::Probe p, std::size_t) {
    if (armed && p == TsStack::Probe::BeforeEmptinessRecheck) {
      armed = false;
      s.push(1, 9);
    }
  });
  const PopResult r = s.pop(0);
  CHECK(r.value == 9u);
  CHECK(r.attempts == 2);
}

TEST_CASE("ts: the five-thread interleaving removes the oldest node") {
  // T5 (thread 4) sees x in T1's pool, reads T2's pool before y arrives,
  // and reads T3's pool only after T4 took z. x stays its candidate.
  SeqClock clock;
  TsStack s(5, clock);
  Recorder rec(s, clock);
  rec.push(0, make_value(0, 0));  // x
  bool armed = true;
  s.set_probe([&](TsStack::Probe p, std::size_t pool) {
    if (armed && p == TsStack::Probe::ScanPool && pool == 2) {
      armed = false;
      rec.push(1, make_value(1, 0));  // y
      rec.push(2, make_value(2, 0));  // z
      CHECK(rec.pop(3).value == make_value(2, 0));
    }
  });
  const PopResult t5 = rec.pop(4);
  CHECK(t5.value == make_value(0, 0));
  CHECK_FALSE(t5.eliminated);
  CHECK(rec.pop(2).value == make_value(1, 0));

  const History h = rec.finish().history;
  const PopOrder order = pop_order_from_removals(h);
  CHECK(order.pops == std::vector<OpId>{pop_returning(h, "t2v0"), pop_returning(h, "t0v0"),
                                        pop_returning(h, "t1v0")});
  const PipelineResult res = check_recorded(h);
  CHECK(res.verdict.linearizable);
  CHECK(certify_witness(h, res.verdict.witness));
}

TEST_CASE("ts: a late removal is accepted only by moving the pop earlier") {
  // Pop A (thread 4) picks a, then pauses; b and c are pushed and pop B
  // takes c. A's removal lands after B's, although b happened-before B and
  // sits above a, so no witness keeps A after B.
  SeqClock clock;
  TsStack s(5, clock);
  Recorder rec(s, clock);
  rec.push(0, make_value(0, 0));  // a
  bool armed = true;
  s.set_probe([&](TsStack::Probe p, std::size_t) {
    if (armed && p == TsStack::Probe::BeforeRemove) {
      armed = false;
      rec.push(1, make_value(1, 0));  // b
      rec.push(2, make_value(2, 0));  // c
      CHECK(rec.pop(3).value == make_value(2, 0));
    }
  });
  CHECK(rec.pop(4).value == make_value(0, 0));
  CHECK(rec.pop(3).value == make_value(1, 0));

  const Recording r = rec.finish();
  const History& h = r.history;
  CHECK(timestamp_law_violations(r).empty());
  CHECK(condition1_field_violations(r).empty());

  const PipelineResult strict = check_recorded(h, ConditionRules::Strengthened);
  CHECK_FALSE(strict.verdict.linearizable);
  REQUIRE(strict.verdict.violation);
  CHECK(strict.verdict.violation->condition == Condition::Condition1);
  CHECK(strict.verdict.violation->pop_index == 1u);

  const PipelineResult res = check_recorded(h);
  REQUIRE(res.verdict.linearizable);
  REQUIRE(res.witness);
  CHECK(certify_witness(h, res.verdict.witness));
  CHECK(oracle_check(h).linearizable);
  // A's pop precedes B's pop in the witness.
  const auto& w = res.verdict.witness;
  CHECK(std::find(w.begin(), w.end(), pop_returning(h, "t0v0")) <
        std::find(w.begin(), w.end(), pop_returning(h, "t2v0")));
}

TEST_CASE("recorder: single thread gives a sequential, accepted history") {
  StressOptions o;
  o.threads = 1;
  o.ops = 4;
  for (StackKind k : {StackKind::Treiber, StackKind::Hsy, StackKind::Ts}) {
    o.impl = k;
    const History h = record_stress(o).history;
    CHECK(h.size() == 4);
    const HBRelation hb(h);
    for (std::size_t a = 0; a + 1 < h.size(); ++a) CHECK(hb.precedes(a, a + 1));
    CHECK(check_recorded(h).verdict.linearizable);
  }
}

TEST_CASE("recorder: schedules depend only on seed and thread") {
  CHECK(stress_schedule(5, 2, 100, 0.5) == stress_schedule(5, 2, 100, 0.5));
  CHECK(stress_schedule(5, 2, 100, 0.5) != stress_schedule(6, 2, 100, 0.5));
  CHECK(stress_schedule(5, 2, 100, 0.5) != stress_schedule(5, 3, 100, 0.5));
  const auto all_pops = stress_schedule(1, 0, 50, 1.0);
  CHECK(std::all_of(all_pops.begin(), all_pops.end(), [](bool b) { return b; }));
}

TEST_CASE("recorder: ranks are total and gapless, values unique") {
  for (StackKind k : {StackKind::Treiber, StackKind::Hsy, StackKind::Ts}) {
    StressOptions o;
    o.impl = k;
    o.ops = 100;
    o.seed = 3;
    const History h = record_stress(o).history;
    CHECK(h.size() == 400);
    std::set<std::uint64_t> ranks;
    for (std::size_t i : h.pop_indices()) {
      const OpId id = h.op(i).id;
      CHECK(h.removal_order().contains(id) != h.eliminated().contains(id));
      if (h.removal_order().contains(id)) ranks.insert(h.removal_order().at(id));
    }
    CHECK(ranks.size() == h.removal_order().size());
    if (!ranks.empty()) {
      CHECK(*ranks.begin() == 1);
      CHECK(*ranks.rbegin() == ranks.size());
    }
    std::set<std::string> pushed;
    for (std::size_t i : h.push_indices()) CHECK(pushed.insert(h.op(i).value).second);
    CHECK(std::holds_alternative<MatchMap>(derive_match(h)));
  }
}

TEST_CASE("recorder: treiber stress is accepted and prefixes agree with the oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    StressOptions o;
    o.ops = 50;
    o.seed = seed;
    const History h = record_stress(o).history;
    const PipelineResult res = check_recorded(h);
    CHECK(res.verdict.linearizable);
    CHECK(certify_witness(h, res.verdict.witness));
    for (std::size_t n = 1; n <= 12; ++n) {
      const History p = h.prefix(n);
      CHECK(check_recorded(p).verdict.linearizable == oracle_check(p).linearizable);
      CHECK(run_pipeline(p).verdict.linearizable == oracle_check(p).linearizable);
    }
  }
}

TEST_CASE("recorder: hsy stress is accepted after stripping") {
  std::size_t markers = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    StressOptions o;
    o.impl = StackKind::Hsy;
    o.seed = seed;
    const History h = record_stress(o).history;
    markers += h.eliminated().size();
    const PipelineResult res = check_recorded(h);
    CHECK(res.verdict.linearizable);
    // Every marked exchange is also a derived elimination pair.
    std::set<OpId> paired;
    for (const EliminationPair& p : res.pairs) paired.insert(p.pop);
    for (OpId pop : h.eliminated()) CHECK(paired.contains(pop));
    for (std::size_t n = 1; n <= 12; n += 3) {
      const History p = h.prefix(n);
      CHECK(check_recorded(p).verdict.linearizable == oracle_check(p).linearizable);
    }
  }
  CHECK(markers > 0);
}

TEST_CASE("recorder: ts stress obeys the timestamp laws and is accepted") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    StressOptions o;
    o.impl = StackKind::Ts;
    o.seed = seed;
    const Recording r = record_stress(o);
    CHECK(r.push_timestamps.size() == r.history.push_indices().size());
    CHECK(timestamp_law_violations(r).empty());
    CHECK(condition1_field_violations(r).empty());
    const PipelineResult res = check_recorded(r.history);
    CHECK(res.verdict.linearizable);
    CHECK(certify_witness(r.history, res.verdict.witness));
  }
}

TEST_CASE("recorder: workers that never finish raise HarnessTimeout") {
  StressOptions o;
  o.impl = StackKind::Hsy;
  o.threads = 1;
  o.ops = 1;
  o.pop_ratio = 0.0;
  o.timeout = std::chrono::milliseconds(200);
  // A lone push with no fast path waits forever for a partner.
  o.configure = [](ConcurrentStack& s) { dynamic_cast<HsyStack&>(s).set_fast_path(false); };
  CHECK_THROWS_AS(record_stress(o), HarnessTimeout);
}
