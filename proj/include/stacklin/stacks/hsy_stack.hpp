#ifndef STACKLIN_STACKS_HSY_STACK_HPP
#define STACKLIN_STACKS_HSY_STACK_HPP

#include <atomic>
#include <random>
#include <vector>

#include "stacklin/stacks/treiber_stack.hpp"

namespace stacklin::stacks {

/// Treiber stack with an elimination-backoff array: after a failed CAS an
/// operation waits briefly in a random exchanger slot, and a push meeting a
/// pop there hands its value over without touching the shared list.
class HsyStack : public ConcurrentStack {
 public:
  HsyStack(std::size_t threads, SeqClock& clock, std::size_t slots = 0, std::size_t wait_spins = 64);

  PushResult push(std::size_t thread, Value v) override;
  PopResult pop(std::size_t thread) override;
  std::size_t threads() const override { return threads_; }
  std::string name() const override { return "hsy"; }

  /// Test hook: with the fast path off, every operation goes through the
  /// exchangers, so a push and a pop can only complete by meeting.
  void set_fast_path(bool enabled) { fast_path_ = enabled; }

  std::size_t eliminations() const { return eliminations_.load(); }

 private:
  struct Slot {
    std::atomic<std::uint64_t> word{0};
  };

  /// Offers `item` (a node index for a push, 0 for a pop). Returns the
  /// partner's item when a push met a pop, nullopt otherwise.
  std::optional<std::uint32_t> exchange(std::size_t thread, std::uint32_t item);

  std::size_t threads_;
  TreiberStack list_;
  std::vector<Slot> slots_;
  std::size_t wait_spins_;
  std::vector<std::mt19937_64> rng_;
  std::atomic<bool> fast_path_{true};
  std::atomic<std::size_t> eliminations_{0};
};

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_HSY_STACK_HPP
