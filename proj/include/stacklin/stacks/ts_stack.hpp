#ifndef STACKLIN_STACKS_TS_STACK_HPP
#define STACKLIN_STACKS_TS_STACK_HPP

#include <atomic>
#include <functional>
#include <vector>

#include "stacklin/stacks/node_arena.hpp"
#include "stacklin/stacks/stack.hpp"

namespace stacklin::stacks {

/// Timestamped stack: one single-producer pool per thread, each a linked
/// list whose nodes carry an interval timestamp. A pop removes the node
/// with the largest timestamp it sees, or any node stamped after the pop
/// started (that push overlaps the pop, so the pair can be eliminated).
class TsStack : public ConcurrentStack {
 public:
  /// Points inside a removal attempt where a test can run code.
  enum class Probe {
    ScanPool,                // before reading pool `pool`
    BeforeRemove,            // candidate chosen in `pool`, not yet taken
    BeforeEmptinessRecheck,  // every pool looked empty
  };
  using ProbeHook = std::function<void(Probe, std::size_t pool)>;

  TsStack(std::size_t threads, SeqClock& clock) : pools_(threads), clock_(clock) {}

  PushResult push(std::size_t thread, Value v) override;
  PopResult pop(std::size_t thread) override;
  std::size_t threads() const override { return pools_.size(); }
  std::string name() const override { return "ts"; }

  /// Not synchronized with running operations; install before starting threads.
  void set_probe(ProbeHook hook) { probe_ = std::move(hook); }
  IntervalClock& timestamps() { return timestamps_; }

 private:
  struct Node {
    Value value = 0;
    std::atomic<std::uint64_t> timestamp{Timestamp::top().pack()};
    std::atomic<std::uint32_t> next{0};
    std::atomic<std::uint64_t> taken{0};  // removal stamp once taken
  };
  struct Pool {
    std::atomic<std::uint64_t> top{0};
  };
  struct Youngest {
    std::uint32_t node = 0;
    std::uint64_t top = 0;
  };
  struct Attempt {
    bool success = false;
    PopResult result;
  };

  Youngest youngest(Pool& pool);
  /// Logical removal, then unlinking of taken nodes at the head.
  bool remove(Pool& pool, std::uint32_t node, std::uint64_t& stamp);
  Attempt try_remove(Timestamp start);
  void probe(Probe p, std::size_t pool) {
    if (probe_) probe_(p, pool);
  }

  std::vector<Pool> pools_;
  SeqClock& clock_;
  IntervalClock timestamps_;
  NodeArena<Node> nodes_;
  ProbeHook probe_;
};

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_TS_STACK_HPP
