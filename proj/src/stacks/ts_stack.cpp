#include "stacklin/stacks/ts_stack.hpp"

namespace stacklin::stacks {

PushResult TsStack::push(std::size_t thread, Value v) {
  Pool& pool = pools_[thread];
  const std::uint32_t n = nodes_.allocate();
  nodes_[n].value = v;
  std::uint64_t w = pool.top.load();
  do {
    nodes_[n].next.store(TopWord::index(w));
  } while (!pool.top.compare_exchange_weak(w, TopWord::replace(w, n)));
  yield_point();
  const Timestamp ts = timestamps_.generate();
  nodes_[n].timestamp.store(ts.pack());
  return {ts};
}

TsStack::Youngest TsStack::youngest(Pool& pool) {
  Youngest y;
  y.top = pool.top.load();
  std::uint32_t i = TopWord::index(y.top);
  while (i != 0 && nodes_[i].taken.load() != 0) i = nodes_[i].next.load();
  y.node = i;
  return y;
}

bool TsStack::remove(Pool& pool, std::uint32_t node, std::uint64_t& stamp) {
  stamp = clock_.tick();
  std::uint64_t expected = 0;
  if (!nodes_[node].taken.compare_exchange_strong(expected, stamp)) return false;
  // The owner may be inserting concurrently; give up on the first lost CAS.
  std::uint64_t w = pool.top.load();
  while (true) {
    const std::uint32_t head = TopWord::index(w);
    if (head == 0 || nodes_[head].taken.load() == 0) break;
    if (!pool.top.compare_exchange_strong(w, TopWord::replace(w, nodes_[head].next.load()))) break;
  }
  return true;
}

TsStack::Attempt TsStack::try_remove(Timestamp start) {
  const std::size_t k = pools_.size();
  std::vector<std::uint64_t> empty_top(k, 0);
  std::uint32_t cand = 0;
  std::size_t cand_pool = 0;
  Timestamp max_ts = Timestamp::bottom();

  for (std::size_t p = 0; p < k; ++p) {
    probe(Probe::ScanPool, p);
    yield_point();
    const Youngest y = youngest(pools_[p]);
    if (y.node == 0) {
      empty_top[p] = y.top;
      continue;
    }
    const Timestamp ts = Timestamp::unpack(nodes_[y.node].timestamp.load());
    if (ts_less(start, ts)) {
      Attempt a;
      std::uint64_t stamp = 0;
      if (remove(pools_[p], y.node, stamp)) {
        a.success = true;
        a.result.value = nodes_[y.node].value;
        a.result.eliminated = true;
      }
      return a;
    }
    if (ts_less(max_ts, ts)) {
      cand = y.node;
      cand_pool = p;
      max_ts = ts;
    }
  }

  if (cand == 0) {
    // Every pool was seen empty and none has changed since its read, so all
    // were empty together at this instant.
    const std::uint64_t stamp = clock_.tick();
    probe(Probe::BeforeEmptinessRecheck, k);
    yield_point();
    for (std::size_t p = 0; p < k; ++p) {
      if (pools_[p].top.load() != empty_top[p]) return {};
    }
    Attempt a;
    a.success = true;
    a.result.stamp = stamp;
    return a;
  }

  probe(Probe::BeforeRemove, cand_pool);
  yield_point();
  Attempt a;
  std::uint64_t stamp = 0;
  if (remove(pools_[cand_pool], cand, stamp)) {
    a.success = true;
    a.result.value = nodes_[cand].value;
    a.result.stamp = stamp;
  }
  return a;
}

PopResult TsStack::pop(std::size_t) {
  const Timestamp start = timestamps_.generate();
  for (std::size_t attempts = 1;; ++attempts) {
    Attempt a = try_remove(start);
    if (a.success) {
      a.result.attempts = attempts;
      return a.result;
    }
    yield_point();
  }
}

}  // namespace stacklin::stacks
