#include "stacklin/oracle.hpp"

#include <stdexcept>
#include <unordered_set>

namespace stacklin {

std::optional<std::string> SeqStackState::pop() {
  if (contents_.empty()) return std::nullopt;
  std::string v = std::move(contents_.back());
  contents_.pop_back();
  return v;
}

bool is_legal_sequential_indices(const History& h, std::span<const std::size_t> seq) {
  std::vector<std::size_t> stack;
  for (std::size_t i : seq) {
    const Operation& op = h.op(i);
    if (op.is_push()) {
      stack.push_back(i);
      continue;
    }
    if (op.returns_empty) {
      if (!stack.empty()) return false;
      continue;
    }
    if (stack.empty() || h.op(stack.back()).value != op.value) return false;
    stack.pop_back();
  }
  return true;
}

bool is_legal_sequential(const History& h, std::span<const OpId> seq) {
  return is_legal_sequential_indices(h, to_indices(h, seq));
}

namespace {

class OracleSearch {
 public:
  OracleSearch(const History& h, bool memoize) : h_(h), memoize_(memoize) {
    const std::size_t n = h.size();
    const HBRelation hb(h);
    preds_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (hb.precedes(a, b)) preds_[b] |= bit(a);
      }
    }
    full_ = n == 64 ? ~0ULL : (bit(n) - 1);
  }

  bool run() { return dfs(0); }
  const std::vector<std::size_t>& witness() const { return order_; }

 private:
  static std::uint64_t bit(std::size_t i) { return 1ULL << i; }

  std::string key(std::uint64_t mask) const {
    std::string k(reinterpret_cast<const char*>(&mask), sizeof mask);
    for (std::size_t s : stack_) k.push_back(static_cast<char>(s));
    return k;
  }

  bool dfs(std::uint64_t mask) {
    if (mask == full_) return true;
    std::string k;
    if (memoize_) {
      k = key(mask);
      if (failed_.contains(k)) return false;
    }
    for (std::size_t c = 0; c < h_.size(); ++c) {
      if ((mask & bit(c)) || (preds_[c] & ~mask)) continue;
      const Operation& op = h_.op(c);
      std::optional<std::size_t> popped;
      if (op.is_push()) {
        stack_.push_back(c);
      } else if (op.returns_empty) {
        if (!stack_.empty()) continue;
      } else {
        if (stack_.empty() || h_.op(stack_.back()).value != op.value) continue;
        popped = stack_.back();
        stack_.pop_back();
      }
      order_.push_back(c);
      if (dfs(mask | bit(c))) return true;
      order_.pop_back();
      if (op.is_push()) {
        stack_.pop_back();
      } else if (popped) {
        stack_.push_back(*popped);
      }
    }
    if (memoize_) failed_.insert(std::move(k));
    return false;
  }

  const History& h_;
  bool memoize_;
  std::vector<std::uint64_t> preds_;
  std::uint64_t full_ = 0;
  std::vector<std::size_t> stack_;
  std::vector<std::size_t> order_;
  std::unordered_set<std::string> failed_;
};

}  // namespace

Verdict oracle_check(const History& h, const OracleOptions& options) {
  if (options.max_ops > 64) throw std::invalid_argument("oracle bound cannot exceed 64 operations");
  if (h.size() > options.max_ops) {
    throw SearchBoundExceeded("history has " + std::to_string(h.size()) +
                              " operations; oracle bound is " + std::to_string(options.max_ops));
  }
  OracleSearch search(h, options.memoize);
  if (search.run()) {
    Verdict v = Verdict::accept(to_ids(h, search.witness()));
    if (!is_legal_sequential_indices(h, search.witness()) ||
        !is_linear_extension(search.witness(), HBRelation(h))) {
      throw InternalInvariantBroken("oracle witness failed self-check");
    }
    return v;
  }
  return Verdict::reject(
      Violation{Condition::NoLinearization, std::nullopt, {}, "no legal sequence preserves happened-before"});
}

}  // namespace stacklin
