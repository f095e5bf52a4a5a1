#ifndef STACKLIN_GENERATE_HPP
#define STACKLIN_GENERATE_HPP

#include <cstddef>
#include <functional>
#include <random>

#include "stacklin/history.hpp"

namespace stacklin {

/// How pop results are chosen for synthetic histories.
enum class ValueMode {
  /// Replay a stack at a random point inside each operation: always linearizable.
  Simulated,
  /// Any pushed value, EMPTY, or occasionally a value nobody pushed.
  Random,
  /// Simulated or Random with equal probability.
  Mixed,
};

struct SyntheticOptions {
  std::size_t ops = 8;
  std::size_t threads = 4;
  double pop_ratio = 0.5;
  ValueMode mode = ValueMode::Mixed;
};

/// Draws operation intervals on an integer timeline (an operation is
/// invoked only on an idle thread) and assigns pop results per `mode`.
History random_history(std::mt19937_64& rng, const SyntheticOptions& options);

/// Calls `visit` once for every history with exactly `ops` operations, up
/// to renaming: every interval layout, every push/pop assignment, every pop
/// result drawn from EMPTY and the pushed values. Each operation runs on its
/// own thread. Returns the number of histories visited.
std::size_t enumerate_histories(std::size_t ops, const std::function<void(const History&)>& visit);

}  // namespace stacklin

#endif  // STACKLIN_GENERATE_HPP
