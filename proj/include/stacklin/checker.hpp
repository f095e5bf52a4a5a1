#ifndef STACKLIN_CHECKER_HPP
#define STACKLIN_CHECKER_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "stacklin/history.hpp"
#include "stacklin/linearizer.hpp"
#include "stacklin/matching.hpp"
#include "stacklin/verdict.hpp"

namespace stacklin {

/// Which pushes count as "already on the stack" when a pop is checked.
enum class ConditionRules {
  /// Condition 1 looks at pushes that happened-before the pop; for an EMPTY
  /// pop, clause (b) looks at interleaved pushes that happened-before a push
  /// matched to an earlier pop. Necessary, not sufficient.
  Stated,
  /// Both conditions also count every push that happened-before an earlier
  /// pop in the order. Necessary for a witness that keeps the order as is,
  /// so it rejects orders the push-first construction would have reordered.
  Strengthened,
};

const char* to_string(ConditionRules rules);

enum class PopOrderErrorKind { MissingRemovalRank, NotALinearExtension };

/// Removal metadata cannot yield a pop order. Signals corrupted input.
class PopOrderError : public std::runtime_error {
 public:
  PopOrderError(PopOrderErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  PopOrderErrorKind kind() const { return kind_; }

 private:
  PopOrderErrorKind kind_;
};

/// Pops sorted by recorded removal rank. Removal actions happen inside the
/// pop's interval, so a valid recording always yields a linear extension;
/// anything else throws PopOrderError.
PopOrder pop_order_from_removals(const History& h);

/// nullopt iff `order` lists every pop of `h` once and never places a pop
/// after one it happened-before.
std::optional<Violation> validate_pop_order(const History& h, const PopOrder& order);

/// For the non-empty pop at position `i` of `order`: its matched push must
/// happen-before it and must not happen-before any other push that also
/// happens-before it (or, Strengthened, an earlier pop) and is not matched
/// to an earlier pop. Throws std::invalid_argument if that pop returned EMPTY.
std::optional<Violation> check_condition1(const History& h, const MatchMap& m,
                                          const PopOrder& order, std::size_t i,
                                          ConditionRules rules = ConditionRules::Stated);

/// For the EMPTY pop at position `i`: (a) every push that happened-before it
/// is matched to an earlier pop; (b) no push interleaved with it and not
/// matched to an earlier pop happened-before a push matched to an earlier
/// pop (Strengthened: any push not matched to an earlier pop happened-before
/// an earlier pop).
/// Throws std::invalid_argument if that pop returned a value.
std::optional<Violation> check_condition2(const History& h, const MatchMap& m,
                                          const PopOrder& order, std::size_t i,
                                          ConditionRules rules = ConditionRules::Stated);

/// Both conditions at every position of `order`, plus validate_pop_order.
std::optional<Violation> check_conditions(const History& h, const MatchMap& m, const PopOrder& order,
                                          ConditionRules rules = ConditionRules::Stated);

/// Moves pops of `order` earlier until the conditions hold. A pop that fails
/// only because a push it cannot skip happened-before an earlier pop is put
/// in front of the first such pop. nullopt when a failure has another cause
/// or a move would break happened-before. `moves` counts relocations.
std::optional<PopOrder> advance_pop_order(const History& h, const MatchMap& m, const PopOrder& order,
                                          ConditionRules rules = ConditionRules::Strengthened,
                                          std::size_t* moves = nullptr);

/// How a witness is produced once the conditions hold.
enum class WitnessStrategy {
  /// Only the push-first construction (linearize). It can fail on orders
  /// that do admit a witness; that surfaces as InternalInvariantBroken.
  PushesFirst,
  /// Push-first, then latest-slot on the same order, on that order with
  /// pops moved earlier, on a repaired order, and finally on any order
  /// passing the conditions, found by search. When none admits a witness
  /// the history is rejected.
  Fallback,
};

enum class WitnessSource { PushesFirst, LatestSlot, AdvancedOrder, RepairedOrder, SearchedOrder };

const char* to_string(WitnessSource source);

struct WitnessReport {
  WitnessSource source = WitnessSource::PushesFirst;
  InsertStats insert;     // from the push-first attempt
  std::size_t moves = 0;  // pop relocations in the order that was used
};

struct CheckOptions {
  ConditionRules rules = ConditionRules::Stated;
  WitnessStrategy witness = WitnessStrategy::Fallback;
  /// Bound on pop count for any search over pop orders.
  std::size_t max_pops = 10;
};

/// Witness for a triple that already passed check_conditions, or nullopt
/// when no pop order admits one. The search only runs when the cheaper
/// constructions fail, and throws SearchBoundExceeded above `max_pops`.
/// Under WitnessStrategy::PushesFirst a failed construction throws
/// InternalInvariantBroken instead.
std::optional<WitnessSequence> find_witness(const History& h, const MatchMap& m, const PopOrder& order,
                                            const CheckOptions& options = {},
                                            WitnessReport* report = nullptr);

/// Checks every position of `order`, then looks for a witness; LINEARIZABLE
/// only with a certified one. `h` should already be stripped of elimination
/// pairs.
Verdict check(const History& h, const MatchMap& m, const PopOrder& order, const CheckOptions& options = {},
              WitnessReport* report = nullptr);

/// Searches pop orders (linear extensions of happened-before over pops,
/// lowest invocation first) for one that passes the conditions, then looks
/// for a witness as `check` does. Prefixes
/// that fail a condition are cut, and sets of placed pops already known to
/// dead-end are skipped. Throws SearchBoundExceeded above `max_pops` pops.
Verdict check_searching(const History& h, const MatchMap& m, const CheckOptions& options = {},
                        WitnessReport* report = nullptr);

}  // namespace stacklin

#endif  // STACKLIN_CHECKER_HPP
