#ifndef STACKLIN_ORACLE_HPP
#define STACKLIN_ORACLE_HPP

#include <span>
#include <string>
#include <vector>

#include "stacklin/history.hpp"
#include "stacklin/verdict.hpp"

namespace stacklin {

/// The sequential LIFO stack. Top is the last element.
class SeqStackState {
 public:
  void push(std::string v) { contents_.push_back(std::move(v)); }
  /// nullopt means EMPTY.
  std::optional<std::string> pop();
  bool empty() const { return contents_.empty(); }
  const std::vector<std::string>& contents() const { return contents_; }

 private:
  std::vector<std::string> contents_;
};

/// Replays `seq` from an empty stack; true iff every pop returns what the
/// sequential stack would.
bool is_legal_sequential(const History& h, std::span<const OpId> seq);
bool is_legal_sequential_indices(const History& h, std::span<const std::size_t> seq);

struct OracleOptions {
  std::size_t max_ops = 12;
  /// Remember (placed set, stack contents) states already shown to fail.
  bool memoize = true;
};

/// Decides linearizability by backtracking over linear extensions of
/// happened-before, abandoning a prefix as soon as a pop disagrees with the
/// replayed stack. Candidates are tried in ascending invocation order, so
/// the witness is reproducible. Throws SearchBoundExceeded above max_ops.
Verdict oracle_check(const History& h, const OracleOptions& options = {});

}  // namespace stacklin

#endif  // STACKLIN_ORACLE_HPP
