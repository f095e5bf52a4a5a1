#include "stacklin/linearizer.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include "stacklin/oracle.hpp"

namespace stacklin {

namespace {

constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

/// rank[i] = position in the pop order of the pop matched to push i.
std::vector<std::size_t> push_ranks(const History& h, const std::vector<std::optional<std::size_t>>& match,
                                    std::span<const std::size_t> order) {
  std::vector<std::size_t> rank(h.size(), kUnmatched);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (auto push = match[order[pos]]) rank[*push] = pos;
  }
  return rank;
}

/// With `slot` set, a later slot outranks everything else, which keeps the
/// output grouped by ascending slot.
std::vector<std::size_t> linearize_pushes(const History& h, std::span<const std::size_t> pushes,
                                          const std::vector<std::size_t>& rank,
                                          const std::vector<std::size_t>* slot = nullptr) {
  // A push is maximal once its response comes after every remaining
  // invocation; removals only shrink that bound, so maximal stays maximal.
  std::vector<std::size_t> by_ret(pushes.begin(), pushes.end());
  std::sort(by_ret.begin(), by_ret.end(),
            [&](std::size_t a, std::size_t b) { return h.op(a).ret_seq > h.op(b).ret_seq; });
  std::set<std::pair<std::uint64_t, std::size_t>> remaining;
  for (std::size_t p : pushes) remaining.emplace(h.op(p).inv_seq, p);

  auto lower_priority = [&](std::size_t a, std::size_t b) {
    if (slot && (*slot)[a] != (*slot)[b]) return (*slot)[a] < (*slot)[b];
    if (rank[a] != rank[b]) return rank[a] > rank[b];
    return h.op(a).inv_seq < h.op(b).inv_seq;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(lower_priority)> maximal(
      lower_priority);

  std::vector<std::size_t> out;
  out.reserve(pushes.size());
  std::size_t next = 0;
  while (!remaining.empty()) {
    const std::uint64_t max_inv = remaining.rbegin()->first;
    while (next < by_ret.size() && h.op(by_ret[next]).ret_seq > max_inv) {
      maximal.push(by_ret[next++]);
    }
    const std::size_t chosen = maximal.top();
    maximal.pop();
    remaining.erase({h.op(chosen).inv_seq, chosen});
    out.push_back(chosen);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void place_pops(const History& h, const HBRelation& hb, std::vector<std::size_t>& seq,
                std::span<const std::size_t> pops,
                const std::vector<std::optional<std::size_t>>& match, InsertStats* stats) {
  std::vector<char> left(h.size(), 0);
  for (std::size_t pop : pops) {
    std::size_t at = 0;
    for (std::size_t k = seq.size(); k > 0; --k) {
      const std::size_t e = seq[k - 1];
      if (h.op(e).is_push() && hb.precedes(e, pop)) {
        at = k;
        break;
      }
    }
    if (at > 0) {
      const std::size_t anchor = at;
      while (at < seq.size() && h.op(seq[at]).is_pop()) ++at;
      if (stats && at != anchor) ++stats->appended_after_pops;
    }

    // Would the pop sit between an earlier pop and its push?
    for (std::size_t k = 0; k < at; ++k) left[seq[k]] = 1;
    std::optional<std::size_t> last_split;
    for (std::size_t k = at; k < seq.size(); ++k) {
      const std::size_t e = seq[k];
      if (h.op(e).is_pop() && left[*match[e]]) last_split = k;
    }
    for (std::size_t k = 0; k < at; ++k) left[seq[k]] = 0;
    if (last_split) {
      at = *last_split + 1;
      if (stats) ++stats->moved_past_pop;
    }
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(at), pop);
  }
}

struct Prepared {
  HBRelation hb;
  std::vector<std::optional<std::size_t>> match;
  std::vector<std::size_t> order;
  std::vector<std::size_t> rank;
};

Prepared prepare(const History& h, const MatchMap& m, const PopOrder& order) {
  Prepared p{HBRelation(h), m.by_index(h), to_indices(h, order.pops), {}};
  std::vector<char> seen(h.size(), 0);
  for (std::size_t i : p.order) {
    if (!h.op(i).is_pop() || seen[i]) {
      throw std::invalid_argument("pop order must list each pop exactly once");
    }
    seen[i] = 1;
  }
  if (p.order.size() != h.pop_indices().size()) {
    throw std::invalid_argument("pop order does not cover every pop");
  }
  p.rank = push_ranks(h, p.match, p.order);
  return p;
}

[[noreturn]] void broken(const std::string& what) { throw InternalInvariantBroken(what); }

/// Running minimum over event positions, queried for "every position after x".
class SuffixMin {
 public:
  explicit SuffixMin(std::size_t n) : tree_(n + 1, kUnmatched), n_(n) {}
  void lower(std::size_t pos, std::size_t value) {
    for (std::size_t i = n_ - pos; i <= n_; i += i & (~i + 1)) tree_[i] = std::min(tree_[i], value);
  }
  std::size_t after(std::size_t pos) const {
    std::size_t best = kUnmatched;
    for (std::size_t i = n_ - pos - 1; i > 0; i -= i & (~i + 1)) best = std::min(best, tree_[i]);
    return best;
  }

 private:
  std::vector<std::size_t> tree_;
  std::size_t n_;
};

/// Range minimum over pop positions, for "earliest slot among pushes whose
/// pop falls in [lo, hi)".
class RangeMin {
 public:
  explicit RangeMin(std::size_t n) : size_(std::max<std::size_t>(1, n)), tree_(2 * size_, kUnmatched) {}
  void set(std::size_t pos, std::size_t value) {
    for (tree_[pos += size_] = value; pos > 1; pos /= 2) tree_[pos / 2] = std::min(tree_[pos], tree_[pos ^ 1]);
  }
  std::size_t query(std::size_t lo, std::size_t hi) const {
    std::size_t best = kUnmatched;
    for (lo += size_, hi += size_; lo < hi; lo /= 2, hi /= 2) {
      if (lo & 1) best = std::min(best, tree_[lo++]);
      if (hi & 1) best = std::min(best, tree_[--hi]);
    }
    return best;
  }

 private:
  std::size_t size_;
  std::vector<std::size_t> tree_;
};

/// slot[push] = number of pops (in `order`) placed before the push. Starts
/// at the latest possible gap: before its own pop, before any pop it
/// happened-before, and no later than any push it happened-before. Then
/// lowered until no two pushes cross, where x crosses y when y is pushed in
/// an earlier gap, is still on the stack when x is pushed, and is popped
/// before x. Unmatched pushes rank after every pop.
std::vector<std::size_t> latest_slots(const History& h, const Prepared& p) {
  const std::size_t n = p.order.size();
  std::vector<std::size_t> by_ret = h.push_indices();
  std::sort(by_ret.begin(), by_ret.end(),
            [&](std::size_t a, std::size_t b) { return h.op(a).ret_seq > h.op(b).ret_seq; });
  std::vector<std::size_t> by_rank;
  for (std::size_t push : h.push_indices()) {
    if (p.rank[push] != kUnmatched) by_rank.push_back(push);
  }
  std::sort(by_rank.begin(), by_rank.end(),
            [&](std::size_t a, std::size_t b) { return p.rank[a] < p.rank[b]; });
  auto rank_of = [&](std::size_t push) { return std::min(p.rank[push], n); };

  std::vector<std::size_t> slot(h.size(), n);
  for (std::size_t push : h.push_indices()) slot[push] = rank_of(push);

  for (bool changed = true; changed;) {
    changed = false;
    // Happened-before: no later than the pops and pushes it precedes.
    SuffixMin bound(h.events().size());
    for (std::size_t k = 0; k < n; ++k) bound.lower(h.op(p.order[k]).inv_seq, k);
    for (std::size_t push : by_ret) {
      const std::size_t s = std::min(slot[push], bound.after(h.op(push).ret_seq));
      if (s < slot[push]) {
        slot[push] = s;
        changed = true;
      }
      bound.lower(h.op(push).inv_seq, slot[push]);
    }
    // Crossing: unmatched pushes rank n, so they are handled after all.
    RangeMin earliest(n);
    auto lower_crossing = [&](std::size_t push) {
      const std::size_t r = rank_of(push);
      for (std::size_t s; slot[push] < r && (s = earliest.query(slot[push], r)) < slot[push];) {
        slot[push] = s;
        changed = true;
      }
    };
    for (std::size_t push : by_rank) {
      lower_crossing(push);
      earliest.set(p.rank[push], slot[push]);
    }
    for (std::size_t push : h.push_indices()) {
      if (p.rank[push] == kUnmatched) lower_crossing(push);
    }
  }
  return slot;
}

std::vector<std::size_t> slot_schedule(const History& h, const Prepared& p) {
  const std::vector<std::size_t> slot = latest_slots(h, p);
  const std::vector<std::size_t> pushes = linearize_pushes(h, h.push_indices(), p.rank, &slot);
  std::vector<std::size_t> seq;
  seq.reserve(h.size());
  std::size_t next = 0;
  for (std::size_t k = 0; k <= p.order.size(); ++k) {
    while (next < pushes.size() && slot[pushes[next]] == k) seq.push_back(pushes[next++]);
    if (k < p.order.size()) seq.push_back(p.order[k]);
  }
  if (next != pushes.size()) broken("push sequence is not grouped by slot");
  return seq;
}

}  // namespace

std::vector<OpId> build_push_linearization(const History& h, const MatchMap& m,
                                           const PopOrder& order) {
  const Prepared p = prepare(h, m, order);
  return to_ids(h, linearize_pushes(h, h.push_indices(), p.rank));
}

std::vector<OpId> insert_pops(std::span<const OpId> pushes, const History& h, const MatchMap& m,
                              const PopOrder& order, InsertStats* stats) {
  const Prepared p = prepare(h, m, order);
  for (std::size_t i : p.order) {
    if (h.op(i).returns_empty) throw std::invalid_argument("insert_pops takes non-empty pops only");
  }
  std::vector<std::size_t> seq = to_indices(h, pushes);
  place_pops(h, p.hb, seq, p.order, p.match, stats);
  return to_ids(h, seq);
}

WitnessSequence insert_empty_pops(const History& h, const MatchMap& m, const PopOrder& order,
                                  InsertStats* stats) {
  const Prepared p = prepare(h, m, order);
  std::vector<std::size_t> out;
  out.reserve(h.size());

  std::vector<std::size_t> segment;
  auto flush = [&](bool last) {
    std::vector<std::size_t> pushes;
    for (std::size_t pop : segment) pushes.push_back(*p.match[pop]);
    if (last) {
      for (std::size_t push : h.push_indices()) {
        if (p.rank[push] == kUnmatched) pushes.push_back(push);
      }
    }
    std::vector<std::size_t> seq = linearize_pushes(h, pushes, p.rank);
    place_pops(h, p.hb, seq, segment, p.match, stats);
    out.insert(out.end(), seq.begin(), seq.end());
    segment.clear();
  };
  for (std::size_t pop : p.order) {
    if (h.op(pop).returns_empty) {
      flush(false);
      out.push_back(pop);
    } else {
      segment.push_back(pop);
    }
  }
  flush(true);

  WitnessSequence witness = to_ids(h, out);
  if (!certify_witness(h, witness)) broken("constructed witness is not a linearization");
  return witness;
}

std::optional<PopOrder> repair_pop_order(const History& h, const MatchMap& m, const PopOrder& order,
                                        std::size_t* moves) {
  Prepared p = prepare(h, m, order);
  const std::size_t n = p.order.size();
  for (std::size_t round = 0; round <= n * n; ++round) {
    const std::vector<std::size_t> seq = slot_schedule(h, p);
    // Replay and find the first pop whose value is buried.
    std::vector<std::size_t> stack;
    std::optional<std::pair<std::size_t, std::size_t>> move;  // (pop, pop to follow)
    for (std::size_t e : seq) {
      if (h.op(e).is_push()) {
        stack.push_back(e);
        continue;
      }
      const auto target = p.match[e];
      if (!target) {
        if (!stack.empty()) return std::nullopt;
        continue;
      }
      auto at = std::find(stack.begin(), stack.end(), *target);
      if (at == stack.end()) return std::nullopt;
      if (at + 1 != stack.end()) {
        std::size_t last = *target;
        for (auto it = at + 1; it != stack.end(); ++it) {
          if (p.rank[*it] == kUnmatched) return std::nullopt;
          if (p.rank[*it] > p.rank[last]) last = *it;
        }
        move = {e, p.order[p.rank[last]]};
        break;
      }
      stack.pop_back();
    }
    if (!move) {
      if (!is_linear_extension(p.order, p.hb)) return std::nullopt;
      return PopOrder{to_ids(h, p.order)};
    }
    auto from = std::find(p.order.begin(), p.order.end(), move->first);
    p.order.erase(from);
    p.order.insert(std::find(p.order.begin(), p.order.end(), move->second) + 1, move->first);
    p.rank = push_ranks(h, p.match, p.order);
    if (moves) ++*moves;
  }
  return std::nullopt;
}

std::optional<WitnessSequence> try_slot_schedule(const History& h, const MatchMap& m,
                                                const PopOrder& order) {
  const Prepared p = prepare(h, m, order);
  WitnessSequence witness = to_ids(h, slot_schedule(h, p));
  if (!certify_witness(h, witness)) return std::nullopt;
  return witness;
}

WitnessSequence linearize(const History& h, const MatchMap& m, const PopOrder& order,
                          InsertStats* stats) {
  return insert_empty_pops(h, m, order, stats);
}

WitnessSequence reinsert_elimination_pairs(std::span<const OpId> witness,
                                           const std::vector<EliminationPair>& pairs,
                                           const History& original) {
  const HBRelation hb(original);
  std::vector<std::size_t> seq = to_indices(original, witness);

  std::vector<std::pair<std::size_t, std::size_t>> ordered;  // (push, pop) indices
  for (const EliminationPair& pair : pairs) {
    ordered.emplace_back(original.require_index(pair.push), original.require_index(pair.pop));
  }
  std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
    return original.op(a.second).inv_seq < original.op(b.second).inv_seq;
  });

  for (const auto& [push, pop] : ordered) {
    const std::size_t anchor = original.op(push).inv_seq < original.op(pop).inv_seq ? pop : push;
    std::size_t at = 0;
    for (std::size_t k = seq.size(); k > 0; --k) {
      if (hb.precedes(seq[k - 1], anchor)) {
        at = k;
        break;
      }
    }
    const std::array<std::size_t, 2> pair{push, pop};
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(at), pair.begin(), pair.end());
  }

  WitnessSequence out = to_ids(original, seq);
  if (!certify_witness(original, out)) broken("witness with elimination pairs is not a linearization");
  return out;
}

bool certify_witness(const History& h, std::span<const OpId> witness) {
  if (witness.size() != h.size()) return false;
  std::vector<char> seen(h.size(), 0);
  std::vector<std::size_t> seq;
  seq.reserve(witness.size());
  for (OpId id : witness) {
    auto idx = h.index_of(id);
    if (!idx || seen[*idx]) return false;
    seen[*idx] = 1;
    seq.push_back(*idx);
  }
  return is_linear_extension(seq, HBRelation(h)) && is_legal_sequential_indices(h, seq);
}

}  // namespace stacklin
