#include "stacklin/reduction.hpp"

namespace stacklin {

std::vector<EliminationPair> find_elimination_pairs(const History& h, const MatchMap& m) {
  const HBRelation hb(h);
  std::vector<EliminationPair> pairs;
  // pop_indices() is ascending by invocation, which fixes the output order.
  for (std::size_t pop : h.pop_indices()) {
    const std::optional<OpId> push_id = m.at(h.op(pop).id);
    if (!push_id) continue;
    const std::size_t push = h.require_index(*push_id);
    if (hb.interleaved(push, pop)) pairs.push_back({*push_id, h.op(pop).id});
  }
  return pairs;
}

History strip(const History& h, const std::vector<EliminationPair>& pairs) {
  if (pairs.empty()) return h;
  std::set<OpId> keep;
  for (const Operation& op : h.ops()) keep.insert(op.id);
  for (const EliminationPair& p : pairs) {
    keep.erase(p.push);
    keep.erase(p.pop);
  }
  return h.restrict_to(keep);
}

}  // namespace stacklin
