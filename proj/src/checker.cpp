#include "stacklin/checker.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <unordered_set>

#include "stacklin/linearizer.hpp"

namespace stacklin {

namespace {

/// Incremental view of "pushes matched to the pops placed so far".
class ConditionState {
 public:
  ConditionState(const History& h, const MatchMap& m, ConditionRules rules)
      : h_(h), hb_(h), match_(m.by_index(h)), matched_(h.size(), 0), rules_(rules) {}

  const HBRelation& hb() const { return hb_; }
  const std::vector<std::optional<std::size_t>>& match() const { return match_; }

  void place(std::size_t pop) {
    undo_.push_back({max_, max_pop_});
    if (auto push = match_[pop]) {
      matched_[*push] = 1;
      if (!max_ || hb_.inv(*push) > hb_.inv(max_->first)) max_ = {*push, pop};
    }
    if (!max_pop_ || hb_.inv(pop) > hb_.inv(*max_pop_)) max_pop_ = pop;
  }

  void unplace(std::size_t pop) {
    if (auto push = match_[pop]) matched_[*push] = 0;
    std::tie(max_, max_pop_) = undo_.back();
    undo_.pop_back();
  }

  std::optional<Violation> condition1(std::size_t pop, std::size_t pos) const {
    const std::size_t own = *match_[pop];
    const Operation& p = h_.op(pop);
    if (!hb_.precedes(own, pop)) {
      return Violation{Condition::Condition1, pos, {p.id, h_.op(own).id},
                       "push " + std::to_string(h_.op(own).id) + " of the value popped by " +
                           std::to_string(p.id) + " does not happen-before it"};
    }
    for (std::size_t q : h_.push_indices()) {
      if (matched_[q] || !hb_.precedes(own, q)) continue;
      if (hb_.precedes(q, pop)) {
        return Violation{Condition::Condition1, pos, {p.id, h_.op(own).id, h_.op(q).id},
                         "pop " + std::to_string(p.id) + " returned " + p.value + " while push " +
                             std::to_string(h_.op(q).id) + " of " + h_.op(q).value +
                             " is later and still available"};
      }
      if (rules_ == ConditionRules::Strengthened && max_pop_ && hb_.precedes(q, *max_pop_)) {
        return Violation{Condition::Condition1, pos, {p.id, h_.op(own).id, h_.op(q).id, h_.op(*max_pop_).id},
                         "pop " + std::to_string(p.id) + " returned " + p.value + " while push " +
                             std::to_string(h_.op(q).id) + " of " + h_.op(q).value +
                             " is later and already pushed before earlier pop " +
                             std::to_string(h_.op(*max_pop_).id)};
      }
    }
    return std::nullopt;
  }

  std::optional<Violation> condition2(std::size_t pop, std::size_t pos) const {
    const Operation& p = h_.op(pop);
    for (std::size_t q : h_.push_indices()) {
      if (!matched_[q] && hb_.precedes(q, pop)) {
        return Violation{Condition::Condition2a, pos, {p.id, h_.op(q).id},
                         "pop " + std::to_string(p.id) + " returned EMPTY after push " +
                             std::to_string(h_.op(q).id) + " whose value was not yet popped"};
      }
    }
    // A push happened-before some placed operation iff its response
    // precedes the latest invocation among them.
    if (rules_ == ConditionRules::Strengthened) {
      if (!max_pop_) return std::nullopt;
      const std::size_t latest = *max_pop_;
      for (std::size_t q : h_.push_indices()) {
        if (matched_[q] || !hb_.precedes(q, latest)) continue;
        return Violation{Condition::Condition2b, pos, {p.id, h_.op(q).id, h_.op(latest).id},
                         "push " + std::to_string(h_.op(q).id) + " overlaps EMPTY pop " +
                             std::to_string(p.id) + " but happened-before earlier pop " +
                             std::to_string(h_.op(latest).id)};
      }
      return std::nullopt;
    }
    if (!max_) return std::nullopt;
    const auto [latest, latest_pop] = *max_;
    for (std::size_t q : h_.push_indices()) {
      if (matched_[q] || !hb_.interleaved(q, pop)) continue;
      if (hb_.precedes(q, latest)) {
        return Violation{Condition::Condition2b, pos,
                         {p.id, h_.op(q).id, h_.op(latest_pop).id, h_.op(latest).id},
                         "push " + std::to_string(h_.op(q).id) + " overlaps EMPTY pop " +
                             std::to_string(p.id) + " but happened-before push " +
                             std::to_string(h_.op(latest).id) + ", popped earlier by " +
                             std::to_string(h_.op(latest_pop).id)};
      }
    }
    return std::nullopt;
  }

  /// Unmatched pushes that make `pop` fail only because they happened-before
  /// an earlier placed pop; nullopt when the failure has another cause.
  std::optional<std::vector<std::size_t>> earlier_blockers(std::size_t pop) const {
    std::vector<std::size_t> out;
    const bool empty = h_.op(pop).returns_empty;
    const std::optional<std::size_t> own = match_[pop];
    if (!empty && !hb_.precedes(*own, pop)) return std::nullopt;
    for (std::size_t q : h_.push_indices()) {
      if (matched_[q] || (!empty && (q == *own || !hb_.precedes(*own, q)))) continue;
      if (hb_.precedes(q, pop)) return std::nullopt;
      if (max_pop_ && hb_.precedes(q, *max_pop_)) out.push_back(q);
    }
    return out;
  }

  std::optional<Violation> condition(std::size_t pop, std::size_t pos) const {
    return h_.op(pop).returns_empty ? condition2(pop, pos) : condition1(pop, pos);
  }

 private:
  const History& h_;
  HBRelation hb_;
  std::vector<std::optional<std::size_t>> match_;
  std::vector<char> matched_;
  std::optional<std::pair<std::size_t, std::size_t>> max_;  // (latest matched push, its pop)
  std::optional<std::size_t> max_pop_;  // latest-invoked placed pop
  ConditionRules rules_;
  std::vector<std::pair<std::optional<std::pair<std::size_t, std::size_t>>, std::optional<std::size_t>>>
      undo_;
};

std::optional<Violation> check_at(const History& h, const MatchMap& m, const PopOrder& order,
                                  std::size_t i, bool want_empty, ConditionRules rules) {
  if (i >= order.pops.size()) throw std::out_of_range("pop index out of range");
  ConditionState state(h, m, rules);
  const std::vector<std::size_t> pops = to_indices(h, order.pops);
  for (std::size_t k = 0; k < i; ++k) state.place(pops[k]);
  const std::size_t pop = pops[i];
  if (!h.op(pop).is_pop() || h.op(pop).returns_empty != want_empty) {
    throw std::invalid_argument(want_empty ? "condition 2 applies to EMPTY pops"
                                           : "condition 1 applies to non-empty pops");
  }
  return want_empty ? state.condition2(pop, i) : state.condition1(pop, i);
}

}  // namespace

const char* to_string(ConditionRules rules) {
  return rules == ConditionRules::Stated ? "stated" : "strengthened";
}

PopOrder pop_order_from_removals(const History& h) {
  std::vector<std::pair<std::uint64_t, OpId>> ranked;
  for (std::size_t i : h.pop_indices()) {
    const OpId id = h.op(i).id;
    auto it = h.removal_order().find(id);
    if (it == h.removal_order().end()) {
      throw PopOrderError(PopOrderErrorKind::MissingRemovalRank,
                          "pop " + std::to_string(id) + " has no removal rank");
    }
    ranked.emplace_back(it->second, id);
  }
  std::sort(ranked.begin(), ranked.end());
  PopOrder order;
  for (const auto& [rank, id] : ranked) order.pops.push_back(id);
  if (auto v = validate_pop_order(h, order)) {
    throw PopOrderError(PopOrderErrorKind::NotALinearExtension, v->detail);
  }
  return order;
}

std::optional<Violation> validate_pop_order(const History& h, const PopOrder& order) {
  std::unordered_set<OpId> seen;
  for (OpId id : order.pops) {
    auto idx = h.index_of(id);
    if (!idx || !h.op(*idx).is_pop() || !seen.insert(id).second) {
      return Violation{Condition::PopOrder, std::nullopt, {id},
                       "pop order entry " + std::to_string(id) + " is unknown, repeated, or not a pop"};
    }
  }
  if (seen.size() != h.pop_indices().size()) {
    return Violation{Condition::PopOrder, std::nullopt, {}, "pop order omits pops"};
  }
  const std::vector<std::size_t> idx = to_indices(h, order.pops);
  const HBRelation hb(h);
  if (!is_linear_extension(idx, hb)) {
    for (std::size_t y = 1; y < idx.size(); ++y) {
      for (std::size_t x = 0; x < y; ++x) {
        if (hb.precedes(idx[y], idx[x])) {
          return Violation{Condition::PopOrder, y, {order.pops[x], order.pops[y]},
                           "pop " + std::to_string(order.pops[y]) + " happened-before pop " +
                               std::to_string(order.pops[x]) + " but is ordered after it"};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_condition1(const History& h, const MatchMap& m,
                                          const PopOrder& order, std::size_t i, ConditionRules rules) {
  return check_at(h, m, order, i, false, rules);
}

std::optional<Violation> check_condition2(const History& h, const MatchMap& m,
                                          const PopOrder& order, std::size_t i, ConditionRules rules) {
  return check_at(h, m, order, i, true, rules);
}

std::optional<Violation> check_conditions(const History& h, const MatchMap& m, const PopOrder& order,
                                          ConditionRules rules) {
  if (auto v = validate_pop_order(h, order)) return v;
  ConditionState state(h, m, rules);
  const std::vector<std::size_t> pops = to_indices(h, order.pops);
  for (std::size_t i = 0; i < pops.size(); ++i) {
    if (auto v = state.condition(pops[i], i)) return v;
    state.place(pops[i]);
  }
  return std::nullopt;
}

std::optional<PopOrder> advance_pop_order(const History& h, const MatchMap& m, const PopOrder& order,
                                          ConditionRules rules, std::size_t* moves) {
  if (validate_pop_order(h, order)) return std::nullopt;
  std::vector<std::size_t> pops = to_indices(h, order.pops);
  const HBRelation hb(h);
  std::size_t relocated = 0;
  const std::size_t limit = pops.size() * pops.size() + 1;
  std::size_t from = 0;
  while (true) {
    ConditionState state(h, m, rules);
    for (std::size_t k = 0; k < from; ++k) state.place(pops[k]);
    std::size_t i = from;
    std::optional<std::vector<std::size_t>> blockers;
    for (; i < pops.size(); ++i) {
      if (state.condition(pops[i], i)) {
        blockers = state.earlier_blockers(pops[i]);
        if (!blockers || blockers->empty()) return std::nullopt;
        break;
      }
      state.place(pops[i]);
    }
    if (i == pops.size()) break;
    if (++relocated > limit) return std::nullopt;

    // First placed pop that some blocker happened-before.
    std::size_t target = i;
    for (std::size_t k = 0; k < i && target == i; ++k) {
      for (std::size_t q : *blockers) {
        if (hb.precedes(q, pops[k])) {
          target = k;
          break;
        }
      }
    }
    for (std::size_t k = target; k < i; ++k) {
      if (hb.precedes(pops[k], pops[i])) return std::nullopt;
    }
    const std::size_t moved = pops[i];
    pops.erase(pops.begin() + static_cast<std::ptrdiff_t>(i));
    pops.insert(pops.begin() + static_cast<std::ptrdiff_t>(target), moved);
    from = target;
  }
  if (moves) *moves = relocated;
  return PopOrder{to_ids(h, pops)};
}

namespace {

/// Depth-first search over pop orders, cutting any prefix that fails a
/// condition. Without a leaf test the outcome depends only on which pops
/// are placed, so dead sets are memoized; with one it does not.
class PopOrderSearch {
 public:
  using Leaf = std::function<bool(const std::vector<std::size_t>&)>;

  PopOrderSearch(const History& h, const MatchMap& m, ConditionRules rules, Leaf leaf = {})
      : h_(h), state_(h, m, rules), leaf_(std::move(leaf)) {
    pops_ = h.pop_indices();
    const std::size_t n = pops_.size();
    preds_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (state_.hb().precedes(pops_[a], pops_[b])) preds_[b] |= 1ULL << a;
      }
    }
    full_ = n == 64 ? ~0ULL : (1ULL << n) - 1;
  }

  bool run() { return dfs(0); }
  PopOrder order() const { return PopOrder{to_ids(h_, chosen_)}; }
  const std::optional<Violation>& first_violation() const { return first_; }

 private:
  bool dfs(std::uint64_t mask) {
    if (mask == full_) return !leaf_ || leaf_(chosen_);
    if (dead_.contains(mask)) return false;
    // pops_ is ascending by invocation, so candidates are tried in that order.
    for (std::size_t c = 0; c < pops_.size(); ++c) {
      const std::uint64_t b = 1ULL << c;
      if ((mask & b) || (preds_[c] & ~mask)) continue;
      if (auto v = state_.condition(pops_[c], chosen_.size())) {
        if (!first_) first_ = std::move(v);
        continue;
      }
      state_.place(pops_[c]);
      chosen_.push_back(pops_[c]);
      if (dfs(mask | b)) return true;
      chosen_.pop_back();
      state_.unplace(pops_[c]);
    }
    if (!leaf_) dead_.insert(mask);
    return false;
  }

  const History& h_;
  ConditionState state_;
  Leaf leaf_;
  std::vector<std::size_t> pops_;
  std::vector<std::uint64_t> preds_;
  std::uint64_t full_ = 0;
  std::vector<std::size_t> chosen_;
  std::unordered_set<std::uint64_t> dead_;
  std::optional<Violation> first_;
};

void require_within_bound(std::size_t pops, std::size_t max_pops) {
  const std::size_t bound = std::min<std::size_t>(max_pops, 64);
  if (pops > bound) {
    throw SearchBoundExceeded("history has " + std::to_string(pops) + " pops; search bound is " +
                              std::to_string(bound));
  }
}

}  // namespace

const char* to_string(WitnessSource source) {
  switch (source) {
    case WitnessSource::PushesFirst: return "pushes-first";
    case WitnessSource::LatestSlot: return "latest-slot";
    case WitnessSource::AdvancedOrder: return "advanced-order";
    case WitnessSource::RepairedOrder: return "repaired-order";
    case WitnessSource::SearchedOrder: return "searched-order";
  }
  return "?";
}

std::optional<WitnessSequence> find_witness(const History& h, const MatchMap& m, const PopOrder& order,
                                            const CheckOptions& options, WitnessReport* report) {
  WitnessReport local;
  WitnessReport& r = report ? *report : local;
  r = WitnessReport{};
  if (options.witness == WitnessStrategy::PushesFirst) {
    r.source = WitnessSource::PushesFirst;
    return linearize(h, m, order, &r.insert);
  }
  try {
    r.source = WitnessSource::PushesFirst;
    return linearize(h, m, order, &r.insert);
  } catch (const InternalInvariantBroken&) {
  }
  if (auto w = try_slot_schedule(h, m, order)) {
    r.source = WitnessSource::LatestSlot;
    return w;
  }
  std::size_t moves = 0;
  if (auto advanced = advance_pop_order(h, m, order, ConditionRules::Strengthened, &moves)) {
    if (auto w = try_slot_schedule(h, m, *advanced)) {
      r.source = WitnessSource::AdvancedOrder;
      r.moves = moves;
      return w;
    }
  }
  if (auto repaired = repair_pop_order(h, m, order, &moves)) {
    if (auto w = try_slot_schedule(h, m, *repaired)) {
      r.source = WitnessSource::RepairedOrder;
      r.moves = moves;
      return w;
    }
  }
  require_within_bound(h.pop_indices().size(), options.max_pops);
  std::optional<WitnessSequence> found;
  PopOrderSearch search(h, m, options.rules, [&](const std::vector<std::size_t>& pops) {
    found = try_slot_schedule(h, m, PopOrder{to_ids(h, pops)});
    return found.has_value();
  });
  if (!search.run()) return std::nullopt;
  r.source = WitnessSource::SearchedOrder;
  return found;
}

namespace {

Verdict witness_verdict(const History& h, const MatchMap& m, const PopOrder& order,
                        const CheckOptions& options, WitnessReport* report) {
  if (auto w = find_witness(h, m, order, options, report)) return Verdict::accept(*std::move(w));
  return Verdict::reject(Violation{Condition::NoLinearization, std::nullopt, {},
                                   "the conditions hold, but no pop order admits a legal sequence"});
}

}  // namespace

Verdict check(const History& h, const MatchMap& m, const PopOrder& order, const CheckOptions& options,
              WitnessReport* report) {
  if (auto v = check_conditions(h, m, order, options.rules)) return Verdict::reject(*v);
  return witness_verdict(h, m, order, options, report);
}

Verdict check_searching(const History& h, const MatchMap& m, const CheckOptions& options,
                        WitnessReport* report) {
  require_within_bound(h.pop_indices().size(), options.max_pops);
  PopOrderSearch search(h, m, options.rules);
  if (search.run()) return witness_verdict(h, m, search.order(), options, report);
  return Verdict::reject(search.first_violation().value_or(
      Violation{Condition::NoLinearization, std::nullopt, {}, "no pop order satisfies the conditions"}));
}

}  // namespace stacklin
