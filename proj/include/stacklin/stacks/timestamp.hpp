#ifndef STACKLIN_STACKS_TIMESTAMP_HPP
#define STACKLIN_STACKS_TIMESTAMP_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>

namespace stacklin::stacks {

/// Interval timestamp [start, end] of two counter readings. `top` marks a
/// node whose timestamp is not written yet and compares above everything;
/// `bottom` compares below every generated timestamp.
struct Timestamp {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  static constexpr Timestamp top() { return {0xFFFFFFFFU, 0xFFFFFFFFU}; }
  static constexpr Timestamp bottom() { return {0, 0}; }
  bool is_top() const { return start == 0xFFFFFFFFU && end == 0xFFFFFFFFU; }

  std::uint64_t pack() const { return (std::uint64_t{start} << 32) | end; }
  static Timestamp unpack(std::uint64_t w) {
    return {static_cast<std::uint32_t>(w >> 32), static_cast<std::uint32_t>(w)};
  }

  std::string to_string() const;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// a <ts b. Irreflexive and transitive; generated timestamps whose
/// intervals overlap are incomparable.
bool ts_less(Timestamp a, Timestamp b);

inline bool incomparable(Timestamp a, Timestamp b) { return !ts_less(a, b) && !ts_less(b, a); }

/// Draws interval timestamps from one shared counter (starting at 1).
class IntervalClock {
 public:
  /// `between` runs after the start reading and before the end reading;
  /// tests use it to force overlap deterministically.
  Timestamp generate(const std::function<void()>& between = {});

 private:
  std::atomic<std::uint32_t> next_{1};
};

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_TIMESTAMP_HPP
