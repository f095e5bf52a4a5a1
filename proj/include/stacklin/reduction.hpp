#ifndef STACKLIN_REDUCTION_HPP
#define STACKLIN_REDUCTION_HPP

#include <vector>

#include "stacklin/history.hpp"
#include "stacklin/matching.hpp"

namespace stacklin {

/// A push and the pop that returned its value while the two overlapped.
/// Such a pair can be removed without changing whether the rest of the
/// history is linearizable.
struct EliminationPair {
  OpId push = 0;
  OpId pop = 0;

  friend bool operator==(const EliminationPair&, const EliminationPair&) = default;
};

/// All pairs (push, pop) with Match(pop) = push and push interleaved with
/// pop, ordered by the pop's invocation.
std::vector<EliminationPair> find_elimination_pairs(const History& h, const MatchMap& m);

/// `h` without the events of the paired operations.
History strip(const History& h, const std::vector<EliminationPair>& pairs);

}  // namespace stacklin

#endif  // STACKLIN_REDUCTION_HPP
