#ifndef STACKLIN_MATCHING_HPP
#define STACKLIN_MATCHING_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stacklin/history.hpp"

namespace stacklin {

/// Which requirement a rejected history failed. The first three are the
/// clauses of a safe pop-to-push mapping; the rest are the happened-before
/// conditions checked against a pop order.
enum class Condition {
  MatchClause1,   // pop returned a value no push inserted
  MatchClause2,   // EMPTY results and unmatched pops disagree
  MatchClause3,   // one pushed value removed twice
  Condition1,     // non-empty pop did not take the latest available value
  Condition2a,    // empty pop while a preceding push was still unpopped
  Condition2b,    // empty pop ordered after a push it cannot follow
  PopOrder,       // the supplied pop order is not a linear extension
  NoLinearization // brute-force search found no legal sequence
};

const char* to_string(Condition c);

struct Violation {
  Condition condition = Condition::NoLinearization;
  /// 0-based position in the pop order, when the condition is positional.
  std::optional<std::size_t> pop_index;
  std::vector<OpId> ops;
  std::string detail;
};

/// pop id -> matched push id, or nullopt for EMPTY.
class MatchMap {
 public:
  MatchMap() = default;
  explicit MatchMap(std::map<OpId, std::optional<OpId>> assignment)
      : assignment_(std::move(assignment)) {}

  const std::map<OpId, std::optional<OpId>>& assignment() const { return assignment_; }
  std::size_t size() const { return assignment_.size(); }
  bool contains(OpId pop) const { return assignment_.contains(pop); }
  /// Throws std::out_of_range for pops outside the map.
  std::optional<OpId> at(OpId pop) const { return assignment_.at(pop); }

  void set(OpId pop, std::optional<OpId> push) { assignment_[pop] = push; }

  /// Per-index view for `h`: entry i is the index of the push matched to pop
  /// index i, or nullopt for EMPTY pops and for pushes.
  std::vector<std::optional<std::size_t>> by_index(const History& h) const;

  friend bool operator==(const MatchMap&, const MatchMap&) = default;

 private:
  std::map<OpId, std::optional<OpId>> assignment_;
};

using MatchResult = std::variant<MatchMap, Violation>;

/// Maps every pop to the unique push of the value it returned. A value no
/// push inserted yields a clause-1 violation and a value returned twice a
/// clause-3 violation; both are verdict material, not errors.
MatchResult derive_match(const History& h);

/// nullopt when all three clauses hold. Throws std::invalid_argument when
/// `m` is not total on the pops of `h` or names unknown operations.
std::optional<Violation> validate_match(const History& h, const MatchMap& m);

}  // namespace stacklin

#endif  // STACKLIN_MATCHING_HPP
