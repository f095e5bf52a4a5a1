#include "stacklin/stacks/treiber_stack.hpp"

namespace stacklin::stacks {

std::uint32_t TreiberStack::new_node(Value v) {
  const std::uint32_t n = nodes_.allocate();
  nodes_[n].value = v;
  return n;
}

bool TreiberStack::try_push(std::uint32_t node) {
  std::uint64_t w = top_.load();
  nodes_[node].next.store(TopWord::index(w));
  yield_point();
  return top_.compare_exchange_strong(w, TopWord::replace(w, node));
}

std::optional<PopResult> TreiberStack::try_pop() {
  std::uint64_t w = top_.load();
  yield_point();
  const std::uint32_t idx = TopWord::index(w);
  if (idx == 0) {
    PopResult r;
    r.stamp = clock_.tick();
    if (top_.load() == w) return r;
    return std::nullopt;
  }
  const std::uint32_t next = nodes_[idx].next.load();
  const std::uint64_t stamp = clock_.tick();
  if (!top_.compare_exchange_strong(w, TopWord::replace(w, next))) return std::nullopt;
  PopResult r;
  r.value = nodes_[idx].value;
  r.stamp = stamp;
  return r;
}

PushResult TreiberStack::push(std::size_t, Value v) {
  const std::uint32_t node = new_node(v);
  while (!try_push(node)) yield_point();
  return {};
}

PopResult TreiberStack::pop(std::size_t) {
  for (std::size_t attempts = 1;; ++attempts) {
    if (auto r = try_pop()) {
      r->attempts = attempts;
      return *r;
    }
    yield_point();
  }
}

}  // namespace stacklin::stacks
