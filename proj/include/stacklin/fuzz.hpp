#ifndef STACKLIN_FUZZ_HPP
#define STACKLIN_FUZZ_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stacklin/history.hpp"

namespace stacklin {

enum class Mutation {
  ValueSwap,       // two pops exchange results (a value or EMPTY)
  RankShuffle,     // removal ranks permuted among pops
  InjectInversion, // push(a), push(b), pop -> a appended after everything
};

const char* to_string(Mutation m);

/// Applies `m`. nullopt when it cannot change `h` (for example a value swap
/// with fewer than two distinct pop results, or a shuffle without ranks).
std::optional<History> mutate(const History& h, Mutation m, std::mt19937_64& rng);

/// Largest history the oracle is asked to decide (before mutation).
inline constexpr std::size_t kMaxFuzzOps = 12;

struct FuzzConfig {
  std::size_t trials = 10000;
  std::size_t max_ops = 8;
  std::uint64_t seed = 1;
  /// Mutate every history before checking.
  bool mutate = false;
  /// Share of trials that use a truncated recording of a real stack instead
  /// of a synthetic layout. Recordings depend on thread scheduling, so only
  /// a zero share makes a campaign fully reproducible.
  double recorded_share = 0.25;
  std::size_t workers = 0;  // 0 = hardware concurrency
  /// Directory for histories the two deciders disagree on; none if empty.
  std::string out_dir;
};

struct FuzzReport {
  std::size_t trials = 0;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t linearizable = 0;  // by the oracle
  std::size_t recorded = 0;      // trials drawn from a real stack
  std::size_t mutated = 0;       // trials where a mutation changed the history
  /// Checker verdicts accepted where the oracle rejected, recorded order
  /// included. Counted inside `disagreements` for the search verdict.
  std::size_t false_accepts = 0;
  std::map<std::string, std::size_t> violations;  // checker label -> count
  std::map<std::string, std::size_t> mutations;   // applied mutation -> count
  std::vector<std::string> persisted;             // files written, sorted
};

/// Runs `trials` independent trials on a worker pool. Trial k draws from
/// its own generator seeded by (seed, k), so results do not depend on the
/// number of workers. Each history is decided by the oracle and by the
/// pipeline (searched order, and recorded order when there are ranks).
/// Throws std::invalid_argument when max_ops exceeds kMaxFuzzOps.
FuzzReport fuzz(const FuzzConfig& config);

}  // namespace stacklin

#endif  // STACKLIN_FUZZ_HPP
