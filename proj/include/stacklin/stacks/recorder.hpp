#ifndef STACKLIN_STACKS_RECORDER_HPP
#define STACKLIN_STACKS_RECORDER_HPP

#include <chrono>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "stacklin/history.hpp"
#include "stacklin/stacks/stack.hpp"

namespace stacklin::stacks {

/// A recorded run: the history (with removal ranks and elimination markers)
/// plus the timestamp each push wrote, for timestamped stacks.
struct Recording {
  History history;
  std::map<OpId, Timestamp> push_timestamps;
};

/// Wraps a stack and logs every call. Each thread appends to its own log;
/// `finish` must run after all threads are done.
class Recorder {
 public:
  Recorder(ConcurrentStack& stack, SeqClock& clock);

  PushResult push(std::size_t thread, Value v);
  PopResult pop(std::size_t thread);

  /// Operation ids are thread * stride + k + 1 for the k-th call of a
  /// thread, with stride the longest log. Removal ranks are renumbered
  /// 1..k by stamp; eliminated pops get a marker instead.
  Recording finish() const;

 private:
  struct Call {
    bool is_pop = false;
    PopResult pop;
    Value pushed = 0;
    std::optional<Timestamp> timestamp;
    std::uint64_t inv = 0;
    std::uint64_t ret = 0;
  };

  ConcurrentStack& stack_;
  SeqClock& clock_;
  std::vector<std::vector<Call>> logs_;
};

class HarnessTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StressOptions {
  StackKind impl = StackKind::Treiber;
  std::size_t threads = 4;
  std::size_t ops = 250;  // per thread
  std::uint64_t seed = 1;
  double pop_ratio = 0.5;
  /// Chance of a yield at each instrumented point of the stack code.
  double yield_probability = 0.05;
  std::chrono::milliseconds timeout{30000};
  /// Runs on the fresh stack before the workers start.
  std::function<void(ConcurrentStack&)> configure;
};

/// Per-thread operation mix: true = pop. Depends only on (seed, thread).
std::vector<bool> stress_schedule(std::uint64_t seed, std::size_t thread, std::size_t ops, double pop_ratio);

/// Runs every thread's schedule against one shared stack and records it.
/// Throws HarnessTimeout when the workers do not finish in time; they are
/// then abandoned, still running.
Recording record_stress(const StressOptions& options);

/// Pairs of pushes a, b with a happened-before b but not ts(a) <ts ts(b).
/// Empty on a correct timestamped stack.
std::vector<std::pair<OpId, OpId>> timestamp_law_violations(const Recording& r);

/// After stripping elimination pairs and ordering pops by removal rank: pops
/// (with a push) whose matched push has a strictly smaller timestamp than
/// some push that happened-before the pop and is not matched to an earlier
/// pop. Reported as (pop, push) pairs.
std::vector<std::pair<OpId, OpId>> condition1_field_violations(const Recording& r);

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_RECORDER_HPP
