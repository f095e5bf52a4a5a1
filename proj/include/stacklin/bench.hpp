#ifndef STACKLIN_BENCH_HPP
#define STACKLIN_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stacklin/stacks/stack.hpp"

namespace stacklin {

enum class BenchFamily {
  /// Prefixes of a stress run of `impl`.
  Recorded,
  /// The same run cut three operations shorter, then push(a), push(b),
  /// pop -> a appended, which every decider rejects.
  Inverted,
  /// n-3 pushes that all overlap, then push(a), push(b), pop -> a in
  /// sequence. Nothing prunes the order of the overlapping pushes.
  ConcurrentPushes,
};

const char* to_string(BenchFamily family);
std::optional<BenchFamily> parse_bench_family(const std::string& s);

struct BenchOptions {
  BenchFamily family = BenchFamily::Recorded;
  stacks::StackKind impl = stacks::StackKind::Treiber;
  std::vector<std::size_t> sizes{4, 8, 12};  // ascending operation counts
  std::uint64_t seed = 1;
  std::size_t threads = 4;
  /// Larger histories are not given to the oracle.
  std::size_t oracle_max_ops = 12;
  /// Timing per row is the median of this many runs.
  std::size_t repeats = 5;
  /// Off: the oracle backtracks without remembering failed states, the
  /// plain exponential search.
  bool oracle_memoize = false;
  /// Few pops leave many interleavings of pushes for the oracle to try.
  double pop_ratio = 0.5;
  /// Yield probability in the recorded runs; high values overlap more operations.
  double yield_probability = 0.5;
};

struct BenchRow {
  std::string family;
  std::size_t ops = 0;
  double checker_ms = 0;
  std::optional<double> oracle_ms;  // nullopt = skipped
  bool checker_linearizable = false;
  std::optional<bool> oracle_linearizable;
};

/// One row per size. Each history is checked with its recorded pop order
/// and, within the bound, by the oracle. A rejection forces the oracle
/// through every surviving interleaving, which is where its cost shows.
/// Throws std::invalid_argument unless sizes are non-empty and ascending.
std::vector<BenchRow> bench(const BenchOptions& options);

/// Tab-separated table with a header row; skipped oracle cells read SKIPPED.
std::string bench_tsv(const std::vector<BenchRow>& rows);

}  // namespace stacklin

#endif  // STACKLIN_BENCH_HPP
