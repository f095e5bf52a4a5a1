#include "stacklin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "stacklin/fuzz.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "stacklin/stacks/recorder.hpp"

namespace stacklin {

namespace {

template <typename F>
double median_ms(std::size_t repeats, F&& f) {
  std::vector<double> times;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, repeats); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

History concurrent_pushes(std::size_t n) {
  std::vector<Event> events;
  const std::size_t k = n > 3 ? n - 3 : 0;
  for (int kind = 0; kind < 2; ++kind) {
    for (std::size_t i = 0; i < k; ++i) {
      Event e;
      e.seq = events.size();
      e.thread = "t" + std::to_string(i);
      e.kind = kind == 0 ? EventKind::Inv : EventKind::Ret;
      e.op = i + 1;
      if (kind == 0) e.value = "v" + std::to_string(i);
      events.push_back(std::move(e));
    }
  }
  std::mt19937_64 unused;
  return *mutate(History::from_events(std::move(events)), Mutation::InjectInversion, unused);
}

BenchRow measure(const History& h, const BenchOptions& options) {
  BenchRow row;
  row.family = to_string(options.family);
  row.ops = h.size();
  PipelineOptions p;
  p.pop_order = PopOrderSource::Recorded;
  row.checker_ms = median_ms(options.repeats, [&] { row.checker_linearizable = run_pipeline(h, p).verdict.linearizable; });
  if (h.size() <= options.oracle_max_ops) {
    bool lin = false;
    row.oracle_ms = median_ms(options.repeats, [&] {
      lin = oracle_check(h, OracleOptions{options.oracle_max_ops, options.oracle_memoize}).linearizable;
    });
    row.oracle_linearizable = lin;
  }
  return row;
}

}  // namespace

const char* to_string(BenchFamily family) {
  switch (family) {
    case BenchFamily::Recorded: return "recorded";
    case BenchFamily::Inverted: return "inverted";
    case BenchFamily::ConcurrentPushes: return "concurrent-pushes";
  }
  return "?";
}

std::optional<BenchFamily> parse_bench_family(const std::string& s) {
  for (BenchFamily f : {BenchFamily::Recorded, BenchFamily::Inverted, BenchFamily::ConcurrentPushes}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

std::vector<BenchRow> bench(const BenchOptions& options) {
  if (options.sizes.empty() || !std::is_sorted(options.sizes.begin(), options.sizes.end())) {
    throw std::invalid_argument("bench: sizes must be non-empty and ascending");
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : options.sizes) {
    if (options.family == BenchFamily::ConcurrentPushes) {
      rows.push_back(measure(concurrent_pushes(n), options));
      continue;
    }
    stacks::StressOptions s;
    s.impl = options.impl;
    s.threads = options.threads;
    s.ops = (n + options.threads - 1) / options.threads;
    s.seed = options.seed + n;
    s.yield_probability = options.yield_probability;
    s.pop_ratio = options.pop_ratio;
    const History run = stacks::record_stress(s).history;
    std::mt19937_64 rng(options.seed);
    if (options.family == BenchFamily::Recorded) {
      rows.push_back(measure(run.prefix(n), options));
    } else {
      rows.push_back(measure(*mutate(run.prefix(n > 3 ? n - 3 : 0), Mutation::InjectInversion, rng), options));
    }
  }
  return rows;
}

std::string bench_tsv(const std::vector<BenchRow>& rows) {
  std::string out = "family\tops\tchecker_ms\toracle_ms\tchecker_verdict\toracle_verdict\n";
  for (const BenchRow& r : rows) {
    out += r.family + '\t' + std::to_string(r.ops) + '\t' + fixed(r.checker_ms) + '\t' + (r.oracle_ms ? fixed(*r.oracle_ms) : "SKIPPED") +
           '\t' + (r.checker_linearizable ? "linearizable" : "violation") + '\t' +
           (r.oracle_linearizable ? (*r.oracle_linearizable ? "linearizable" : "violation") : "SKIPPED") + '\n';
  }
  return out;
}

}  // namespace stacklin
