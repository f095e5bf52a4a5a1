#ifndef STACKLIN_STACKS_CLOCK_HPP
#define STACKLIN_STACKS_CLOCK_HPP

#include <atomic>
#include <cstdint>
#include <random>

namespace stacklin::stacks {

/// Global event counter. Invocations, responses and removal stamps all
/// draw from the same clock, so a stamp taken inside an operation always
/// lies between that operation's events.
class SeqClock {
 public:
  std::uint64_t tick() { return next_.fetch_add(1); }
  std::uint64_t peek() const { return next_.load(); }

 private:
  std::atomic<std::uint64_t> next_{1};
};

/// Per-thread random yields at interesting points, so a single core still
/// sees interleavings. Off unless a thread installs a Jitter.
class Jitter {
 public:
  Jitter(std::uint64_t seed, double probability) : rng_(seed), coin_(probability) {}
  void maybe_yield();

  /// Installs `j` for the calling thread (nullptr uninstalls).
  static void install(Jitter* j);

 private:
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_;
};

/// Yields when the calling thread has a Jitter installed and its coin says so.
void yield_point();

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_CLOCK_HPP
