#ifndef STACKLIN_LINEARIZER_HPP
#define STACKLIN_LINEARIZER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stacklin/history.hpp"
#include "stacklin/matching.hpp"
#include "stacklin/reduction.hpp"
#include "stacklin/verdict.hpp"

namespace stacklin {

// Witness construction for a history (already stripped of elimination
// pairs) whose pop order passed both happened-before conditions. Every
// entry point that returns a full witness certifies it against the
// sequential stack and happened-before and throws InternalInvariantBroken
// if that ever fails.

/// Orders all pushes of `h` right to left. At each step the candidates are
/// the pushes no remaining push happened-after; the one whose matching pop
/// comes first in `order` is placed, unmatched pushes count as last, and
/// ties go to the larger invocation.
std::vector<OpId> build_push_linearization(const History& h, const MatchMap& m,
                                           const PopOrder& order);

/// Counters describing how insert_pops placed each pop.
struct InsertStats {
  std::size_t appended_after_pops = 0;  // landed behind a block of earlier pops
  std::size_t moved_past_pop = 0;       // relocated out of another pop's push..pop span
};

/// Inserts the non-empty pops of `order`, one at a time, into the push
/// sequence. Each pop goes after the rightmost push that happened-before it
/// and any pops already sitting right behind that push. If the pop then
/// separates an earlier pop from its push, it moves to just after the
/// rightmost such pop. Throws std::invalid_argument if `order` contains an
/// EMPTY pop.
std::vector<OpId> insert_pops(std::span<const OpId> pushes, const History& h, const MatchMap& m,
                              const PopOrder& order, InsertStats* stats = nullptr);

/// Builds the full witness, EMPTY pops included: for each EMPTY pop the
/// pops before it and their pushes are linearized first, then the EMPTY
/// pop, then the rest. Certified.
WitnessSequence insert_empty_pops(const History& h, const MatchMap& m, const PopOrder& order,
                                  InsertStats* stats = nullptr);

/// Keeps `order` as the witness's pop order. Each push is deferred to the
/// latest gap between pops it can occupy (before its own pop, before any pop
/// it happened-before, and no later than anything it happened-before);
/// pushes sharing a gap are ordered as in build_push_linearization.
/// nullopt iff the result does not certify.
std::optional<WitnessSequence> try_slot_schedule(const History& h, const MatchMap& m,
                                                const PopOrder& order);

/// Rewrites `order` until try_slot_schedule can keep it: while some pop's
/// value is buried under values popped later, that pop moves to just after
/// the last of those pops. nullopt if a move leaves no valid pop order.
/// `moves` counts the relocations.
std::optional<PopOrder> repair_pop_order(const History& h, const MatchMap& m, const PopOrder& order,
                                        std::size_t* moves = nullptr);

/// Alias for insert_empty_pops, the push-first construction.
WitnessSequence linearize(const History& h, const MatchMap& m, const PopOrder& order,
                          InsertStats* stats = nullptr);

/// Puts elimination pairs back into a witness of the stripped history. When
/// the push was invoked first, the pop is placed after the rightmost element
/// that happened-before it and the push immediately to its left; otherwise
/// the push is placed that way and the pop immediately to its right. Pairs
/// are handled in ascending order of the pop's invocation. Certified
/// against `original`.
WitnessSequence reinsert_elimination_pairs(std::span<const OpId> witness,
                                           const std::vector<EliminationPair>& pairs,
                                           const History& original);

/// Legal under the sequential stack and preserves happened-before.
bool certify_witness(const History& h, std::span<const OpId> witness);

}  // namespace stacklin

#endif  // STACKLIN_LINEARIZER_HPP
