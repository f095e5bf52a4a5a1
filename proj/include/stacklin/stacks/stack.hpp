#ifndef STACKLIN_STACKS_STACK_HPP
#define STACKLIN_STACKS_STACK_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "stacklin/stacks/clock.hpp"
#include "stacklin/stacks/timestamp.hpp"

namespace stacklin::stacks {

/// Opaque nonzero token. make_value packs the pushing thread and a
/// per-thread counter so every pushed value is unique.
using Value = std::uint64_t;

inline Value make_value(std::size_t thread, std::uint32_t counter) {
  return (static_cast<Value>(thread + 1) << 32) | counter;
}
/// Renders a token as "t<thread>v<counter>".
std::string value_name(Value v);

struct PushResult {
  /// Set by timestamped stacks only.
  std::optional<Timestamp> timestamp;
};

struct PopResult {
  std::optional<Value> value;  // nullopt = EMPTY
  /// Clock reading at the removal action (the successful CAS, or the
  /// emptiness decision). Zero when the pop completed by elimination.
  std::uint64_t stamp = 0;
  /// Completed by exchanging with a concurrent push instead of removing
  /// from the shared structure.
  bool eliminated = false;
  /// Attempts before success; at least 1.
  std::size_t attempts = 1;
};

/// A lock-free stack shared by a fixed number of threads. `thread` is the
/// caller's index in [0, threads()); implementations may keep per-thread state.
class ConcurrentStack {
 public:
  virtual ~ConcurrentStack() = default;
  virtual PushResult push(std::size_t thread, Value v) = 0;
  virtual PopResult pop(std::size_t thread) = 0;
  virtual std::size_t threads() const = 0;
  virtual std::string name() const = 0;
};

enum class StackKind { Treiber, Hsy, Ts };

const char* to_string(StackKind kind);
std::optional<StackKind> parse_stack_kind(const std::string& s);

/// `clock` supplies removal stamps and must outlive the stack.
std::unique_ptr<ConcurrentStack> make_stack(StackKind kind, std::size_t threads, SeqClock& clock);

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_STACK_HPP
