#ifndef STACKLIN_STACKS_TREIBER_STACK_HPP
#define STACKLIN_STACKS_TREIBER_STACK_HPP

#include <atomic>

#include "stacklin/stacks/node_arena.hpp"
#include "stacklin/stacks/stack.hpp"

namespace stacklin::stacks {

struct ListNode {
  Value value = 0;
  std::atomic<std::uint32_t> next{0};
};

/// Single CAS-guarded top pointer. Push and pop linearize at their
/// successful CAS; an EMPTY pop at its re-read of a null top.
class TreiberStack : public ConcurrentStack {
 public:
  TreiberStack(std::size_t threads, SeqClock& clock) : threads_(threads), clock_(clock) {}

  PushResult push(std::size_t thread, Value v) override;
  PopResult pop(std::size_t thread) override;
  std::size_t threads() const override { return threads_; }
  std::string name() const override { return "treiber"; }

  // Single attempts, shared with the elimination-backoff stack.
  bool try_push(std::uint32_t node);
  /// nullopt: contention, retry. Otherwise the pop's result.
  std::optional<PopResult> try_pop();

  std::uint32_t new_node(Value v);
  Value value_of(std::uint32_t node) { return nodes_[node].value; }

 private:
  std::size_t threads_;
  SeqClock& clock_;
  NodeArena<ListNode> nodes_;
  std::atomic<std::uint64_t> top_{0};
};

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_TREIBER_STACK_HPP
