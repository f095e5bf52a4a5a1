#include "stacklin/matching.hpp"

#include <stdexcept>
#include <unordered_map>

namespace stacklin {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::MatchClause1: return "match-clause-1";
    case Condition::MatchClause2: return "match-clause-2";
    case Condition::MatchClause3: return "match-clause-3";
    case Condition::Condition1: return "condition-1";
    case Condition::Condition2a: return "condition-2a";
    case Condition::Condition2b: return "condition-2b";
    case Condition::PopOrder: return "pop-order";
    case Condition::NoLinearization: return "no-linearization";
  }
  return "?";
}

std::vector<std::optional<std::size_t>> MatchMap::by_index(const History& h) const {
  std::vector<std::optional<std::size_t>> out(h.size());
  for (const auto& [pop, push] : assignment_) {
    if (push) out[h.require_index(pop)] = h.require_index(*push);
  }
  return out;
}

MatchResult derive_match(const History& h) {
  std::unordered_map<std::string, std::size_t> push_of_value;
  for (std::size_t i : h.push_indices()) push_of_value.emplace(h.op(i).value, i);

  std::map<OpId, std::optional<OpId>> assignment;
  std::unordered_map<std::size_t, std::size_t> taken_by;  // push index -> pop index
  for (std::size_t i : h.pop_indices()) {
    const Operation& pop = h.op(i);
    if (pop.returns_empty) {
      assignment.emplace(pop.id, std::nullopt);
      continue;
    }
    auto it = push_of_value.find(pop.value);
    if (it == push_of_value.end()) {
      return Violation{Condition::MatchClause1, std::nullopt, {pop.id},
                       "pop " + std::to_string(pop.id) + " returned " + pop.value +
                           ", which was never pushed"};
    }
    auto [prev, fresh] = taken_by.emplace(it->second, i);
    if (!fresh) {
      const OpId first = h.op(prev->second).id;
      return Violation{Condition::MatchClause3, std::nullopt,
                       {first, pop.id, h.op(it->second).id},
                       "value " + pop.value + " returned by pops " + std::to_string(first) +
                           " and " + std::to_string(pop.id)};
    }
    assignment.emplace(pop.id, h.op(it->second).id);
  }
  return MatchMap(std::move(assignment));
}

std::optional<Violation> validate_match(const History& h, const MatchMap& m) {
  for (const auto& [pop, push] : m.assignment()) {
    auto idx = h.index_of(pop);
    if (!idx || !h.op(*idx).is_pop()) {
      throw std::invalid_argument("match names " + std::to_string(pop) + ", not a pop of the history");
    }
    if (push) {
      auto pidx = h.index_of(*push);
      if (!pidx || !h.op(*pidx).is_push()) {
        throw std::invalid_argument("match target " + std::to_string(*push) +
                                    " is not a push of the history");
      }
    }
  }
  for (std::size_t i : h.pop_indices()) {
    if (!m.contains(h.op(i).id)) {
      throw std::invalid_argument("match is not total: pop " + std::to_string(h.op(i).id) +
                                  " unmapped");
    }
  }

  std::unordered_map<OpId, OpId> first_pop_of;
  for (std::size_t i : h.pop_indices()) {
    const Operation& pop = h.op(i);
    const std::optional<OpId> target = m.at(pop.id);
    if (target.has_value() == pop.returns_empty) {
      return Violation{Condition::MatchClause2, std::nullopt, {pop.id},
                       pop.returns_empty
                           ? "EMPTY pop " + std::to_string(pop.id) + " is mapped to a push"
                           : "pop " + std::to_string(pop.id) + " returned a value but is mapped to EMPTY"};
    }
    if (!target) continue;
    const Operation& push = h.op_by_id(*target);
    if (push.value != pop.value) {
      return Violation{Condition::MatchClause1, std::nullopt, {pop.id, push.id},
                       "pop " + std::to_string(pop.id) + " returned " + pop.value + " but push " +
                           std::to_string(push.id) + " inserted " + push.value};
    }
    auto [prev, fresh] = first_pop_of.emplace(push.id, pop.id);
    if (!fresh) {
      return Violation{Condition::MatchClause3, std::nullopt, {prev->second, pop.id, push.id},
                       "push " + std::to_string(push.id) + " matched by pops " +
                           std::to_string(prev->second) + " and " + std::to_string(pop.id)};
    }
  }
  return std::nullopt;
}

}  // namespace stacklin
