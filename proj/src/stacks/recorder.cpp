#include "stacklin/stacks/recorder.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <latch>
#include <mutex>
#include <random>
#include <thread>

#include "stacklin/checker.hpp"
#include "stacklin/matching.hpp"
#include "stacklin/reduction.hpp"

namespace stacklin::stacks {

Recorder::Recorder(ConcurrentStack& stack, SeqClock& clock)
    : stack_(stack), clock_(clock), logs_(stack.threads()) {}

PushResult Recorder::push(std::size_t thread, Value v) {
  Call c;
  c.pushed = v;
  c.inv = clock_.tick();
  PushResult r = stack_.push(thread, v);
  c.ret = clock_.tick();
  c.timestamp = r.timestamp;
  logs_[thread].push_back(c);
  return r;
}

PopResult Recorder::pop(std::size_t thread) {
  Call c;
  c.is_pop = true;
  c.inv = clock_.tick();
  c.pop = stack_.pop(thread);
  c.ret = clock_.tick();
  logs_[thread].push_back(c);
  return c.pop;
}

Recording Recorder::finish() const {
  std::size_t stride = 1;
  for (const auto& log : logs_) stride = std::max(stride, log.size());

  Recording out;
  std::vector<Event> events;
  std::vector<std::pair<std::uint64_t, OpId>> stamps;
  std::set<OpId> eliminated;
  for (std::size_t t = 0; t < logs_.size(); ++t) {
    const std::string thread = "t" + std::to_string(t);
    for (std::size_t k = 0; k < logs_[t].size(); ++k) {
      const Call& c = logs_[t][k];
      const OpId id = t * stride + k + 1;
      Event inv;
      inv.seq = c.inv;
      inv.thread = thread;
      inv.kind = EventKind::Inv;
      inv.op = id;
      inv.method = c.is_pop ? Method::Pop : Method::Push;
      Event ret = inv;
      ret.seq = c.ret;
      ret.kind = EventKind::Ret;
      if (c.is_pop) {
        if (c.pop.value) {
          ret.value = value_name(*c.pop.value);
        } else {
          ret.empty = true;
        }
        if (c.pop.eliminated) {
          eliminated.insert(id);
        } else {
          stamps.emplace_back(c.pop.stamp, id);
        }
      } else {
        inv.value = value_name(c.pushed);
        if (c.timestamp) out.push_timestamps[id] = *c.timestamp;
      }
      events.push_back(std::move(inv));
      events.push_back(std::move(ret));
    }
  }
  std::sort(stamps.begin(), stamps.end());
  std::map<OpId, std::uint64_t> ranks;
  for (std::size_t i = 0; i < stamps.size(); ++i) ranks[stamps[i].second] = i + 1;
  out.history = History::from_events(std::move(events), std::move(ranks), std::move(eliminated));
  return out;
}

std::vector<bool> stress_schedule(std::uint64_t seed, std::size_t thread, std::size_t ops, double pop_ratio) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + thread);
  std::bernoulli_distribution is_pop(pop_ratio);
  std::vector<bool> out(ops);
  for (std::size_t i = 0; i < ops; ++i) out[i] = is_pop(rng);
  return out;
}

namespace {

struct Run {
  SeqClock clock;
  std::unique_ptr<ConcurrentStack> stack;
  std::unique_ptr<Recorder> recorder;
  std::mutex mu;
  std::condition_variable cv;
  std::size_t done = 0;
};

}  // namespace

Recording record_stress(const StressOptions& options) {
  if (options.threads == 0) throw std::invalid_argument("record_stress: threads must be positive");
  auto run = std::make_shared<Run>();
  run->stack = make_stack(options.impl, options.threads, run->clock);
  if (options.configure) options.configure(*run->stack);
  run->recorder = std::make_unique<Recorder>(*run->stack, run->clock);

  auto start = std::make_shared<std::latch>(static_cast<std::ptrdiff_t>(options.threads));
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < options.threads; ++t) {
    std::vector<bool> schedule = stress_schedule(options.seed, t, options.ops, options.pop_ratio);
    workers.emplace_back([run, start, t, schedule = std::move(schedule), seed = options.seed,
                          p = options.yield_probability] {
      Jitter jitter(seed ^ (0xD1B54A32D192ED03ULL * (t + 1)), p);
      Jitter::install(&jitter);
      start->arrive_and_wait();
      std::uint32_t counter = 0;
      for (bool is_pop : schedule) {
        if (is_pop) {
          run->recorder->pop(t);
        } else {
          run->recorder->push(t, make_value(t, counter++));
        }
      }
      Jitter::install(nullptr);
      std::lock_guard lock(run->mu);
      ++run->done;
      run->cv.notify_all();
    });
  }

  bool finished = false;
  {
    std::unique_lock lock(run->mu);
    finished = run->cv.wait_for(lock, options.timeout, [&] { return run->done == options.threads; });
  }
  if (!finished) {
    for (auto& w : workers) w.detach();
    throw HarnessTimeout("stress workers did not finish within " + std::to_string(options.timeout.count()) +
                         " ms");
  }
  for (auto& w : workers) w.join();
  return run->recorder->finish();
}

std::vector<std::pair<OpId, OpId>> timestamp_law_violations(const Recording& r) {
  const History& h = r.history;
  std::vector<std::pair<OpId, OpId>> out;
  std::vector<std::size_t> pushes;
  for (std::size_t i : h.push_indices()) {
    if (r.push_timestamps.contains(h.op(i).id)) pushes.push_back(i);
  }
  // Ascending invocation; a's response precedes b's invocation.
  for (std::size_t b : pushes) {
    const Timestamp tb = r.push_timestamps.at(h.op(b).id);
    for (std::size_t a : pushes) {
      if (h.op(a).ret_seq < h.op(b).inv_seq && !ts_less(r.push_timestamps.at(h.op(a).id), tb)) {
        out.emplace_back(h.op(a).id, h.op(b).id);
      }
    }
  }
  return out;
}

std::vector<std::pair<OpId, OpId>> condition1_field_violations(const Recording& r) {
  MatchResult derived = derive_match(r.history);
  if (!std::holds_alternative<MatchMap>(derived)) {
    throw std::invalid_argument("condition1_field_violations: recording has no safe matching");
  }
  const MatchMap& full = std::get<MatchMap>(derived);
  const History h = strip(r.history, find_elimination_pairs(r.history, full));
  const PopOrder order = pop_order_from_removals(h);

  std::vector<char> matched_earlier(h.size(), 0);
  std::vector<std::pair<OpId, OpId>> out;
  for (OpId pop_id : order.pops) {
    const std::size_t pop = h.require_index(pop_id);
    const std::optional<OpId> push_id = full.at(pop_id);
    if (!push_id) continue;
    const std::size_t mine = h.require_index(*push_id);
    const auto own_ts = r.push_timestamps.find(*push_id);
    if (own_ts != r.push_timestamps.end()) {
      for (std::size_t p : h.push_indices()) {
        if (matched_earlier[p] || p == mine || h.op(p).ret_seq >= h.op(pop).inv_seq) continue;
        const auto ts = r.push_timestamps.find(h.op(p).id);
        if (ts != r.push_timestamps.end() && ts_less(own_ts->second, ts->second)) {
          out.emplace_back(pop_id, h.op(p).id);
        }
      }
    }
    matched_earlier[mine] = 1;
  }
  return out;
}

}  // namespace stacklin::stacks
