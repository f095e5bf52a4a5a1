#include "stacklin/history.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace stacklin {

const char* to_string(HistoryErrorKind kind) {
  switch (kind) {
    case HistoryErrorKind::MalformedLine: return "MalformedLine";
    case HistoryErrorKind::DuplicateOpId: return "DuplicateOpId";
    case HistoryErrorKind::RetWithoutInv: return "RetWithoutInv";
    case HistoryErrorKind::DuplicatePushValue: return "DuplicatePushValue";
  }
  return "?";
}

namespace {

std::string describe(HistoryErrorKind kind, std::size_t line, const std::string& what) {
  std::string out = to_string(kind);
  if (line != 0) out += " (line " + std::to_string(line) + ")";
  out += ": " + what;
  return out;
}

}  // namespace

HistoryError::HistoryError(HistoryErrorKind kind, std::size_t line, const std::string& what)
    : std::runtime_error(describe(kind, line, what)), kind_(kind), line_(line) {}

History History::from_events(std::vector<Event> events,
                             std::map<OpId, std::uint64_t> removal_order,
                             std::set<OpId> eliminated) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.seq < b.seq; });
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].seq == events[i - 1].seq) {
      throw HistoryError(HistoryErrorKind::MalformedLine, 0,
                         "sequence number " + std::to_string(events[i].seq) + " used twice");
    }
  }

  History h;

  // First pass: pair every RET with its INV and find pending invocations.
  std::unordered_map<OpId, std::size_t> open;  // op -> index of its INV
  std::unordered_set<OpId> seen;
  std::unordered_set<OpId> completed;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.kind == EventKind::Inv) {
      if (!seen.insert(e.op).second) {
        throw HistoryError(HistoryErrorKind::DuplicateOpId, 0,
                           "operation " + std::to_string(e.op) + " invoked twice");
      }
      open.emplace(e.op, i);
      continue;
    }
    auto it = open.find(e.op);
    if (it == open.end()) {
      throw HistoryError(HistoryErrorKind::RetWithoutInv, 0,
                         "response of operation " + std::to_string(e.op) + " has no invocation");
    }
    const Event& inv = events[it->second];
    if (inv.thread != e.thread) {
      throw HistoryError(HistoryErrorKind::RetWithoutInv, 0,
                         "response of operation " + std::to_string(e.op) + " on thread " +
                             e.thread + " but invoked on " + inv.thread);
    }
    open.erase(it);
    completed.insert(e.op);
  }
  std::vector<OpId> pending;
  for (const auto& [op, idx] : open) pending.push_back(op);
  std::sort(pending.begin(), pending.end());
  for (OpId op : pending) {
    h.warnings_.push_back("dropped pending invocation of operation " + std::to_string(op));
  }

  // Second pass: keep events of complete operations and renumber densely.
  std::unordered_map<OpId, std::size_t> inv_pos;
  for (Event& e : events) {
    if (!completed.contains(e.op)) continue;
    e.seq = h.events_.size();
    if (e.kind == EventKind::Inv) {
      inv_pos.emplace(e.op, h.events_.size());
    } else {
      e.method = h.events_[inv_pos.at(e.op)].method;
    }
    h.events_.push_back(std::move(e));
  }

  std::unordered_set<std::string> push_values;
  for (const Event& e : h.events_) {
    if (e.kind != EventKind::Inv) continue;
    Operation op;
    op.id = e.op;
    op.thread = e.thread;
    op.method = e.method;
    op.inv_seq = e.seq;
    if (e.method == Method::Push) {
      if (!e.value) {
        throw HistoryError(HistoryErrorKind::MalformedLine, 0,
                           "push " + std::to_string(e.op) + " has no value");
      }
      op.value = *e.value;
      if (!push_values.insert(op.value).second) {
        throw HistoryError(HistoryErrorKind::DuplicatePushValue, 0,
                           "value " + op.value + " pushed twice");
      }
    }
    h.index_.emplace(op.id, h.ops_.size());
    h.ops_.push_back(std::move(op));
  }
  for (const Event& e : h.events_) {
    if (e.kind != EventKind::Ret) continue;
    Operation& op = h.ops_[h.index_.at(e.op)];
    op.ret_seq = e.seq;
    if (op.is_pop()) {
      if (e.empty) {
        op.returns_empty = true;
      } else if (e.value) {
        op.value = *e.value;
      } else {
        throw HistoryError(HistoryErrorKind::MalformedLine, 0,
                           "pop " + std::to_string(e.op) + " returns neither a value nor empty");
      }
    }
  }

  for (std::size_t i = 0; i < h.ops_.size(); ++i) {
    (h.ops_[i].is_push() ? h.pushes_ : h.pops_).push_back(i);
  }

  for (const auto& [op, rank] : removal_order) {
    auto idx = h.index_of(op);
    if (!idx) {
      h.warnings_.push_back("removal rank for dropped operation " + std::to_string(op) +
                            " discarded");
      continue;
    }
    if (!h.ops_[*idx].is_pop()) {
      throw HistoryError(HistoryErrorKind::MalformedLine, 0,
                         "removal rank given for non-pop operation " + std::to_string(op));
    }
    h.removal_order_.emplace(op, rank);
  }
  for (OpId op : eliminated) {
    auto idx = h.index_of(op);
    if (!idx) continue;
    if (!h.ops_[*idx].is_pop()) {
      throw HistoryError(HistoryErrorKind::MalformedLine, 0,
                         "elimination marker on non-pop operation " + std::to_string(op));
    }
    h.eliminated_.insert(op);
  }
  return h;
}

std::optional<std::size_t> History::index_of(OpId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t History::require_index(OpId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown operation " + std::to_string(id));
  return it->second;
}

History History::restrict_to(const std::set<OpId>& keep) const {
  std::vector<Event> events;
  events.reserve(events_.size());
  for (const Event& e : events_) {
    if (keep.contains(e.op)) events.push_back(e);
  }
  std::map<OpId, std::uint64_t> removal;
  for (const auto& [op, rank] : removal_order_) {
    if (keep.contains(op)) removal.emplace(op, rank);
  }
  std::set<OpId> elim;
  for (OpId op : eliminated_) {
    if (keep.contains(op)) elim.insert(op);
  }
  return from_events(std::move(events), std::move(removal), std::move(elim));
}

History History::prefix(std::size_t max_ops) const {
  std::set<OpId> done;
  for (const Event& e : events_) {
    if (e.kind != EventKind::Ret) continue;
    if (done.size() == max_ops) break;
    done.insert(e.op);
  }
  return restrict_to(done);
}

History History::with_removal_order(std::map<OpId, std::uint64_t> removal_order) const {
  return from_events(events_, std::move(removal_order), eliminated_);
}

HBRelation::HBRelation(const History& h) {
  inv_.reserve(h.size());
  ret_.reserve(h.size());
  for (const Operation& op : h.ops()) {
    inv_.push_back(op.inv_seq);
    ret_.push_back(op.ret_seq);
  }
}

HBRelation happened_before(const History& h) { return HBRelation(h); }

bool is_linear_extension(std::span<const std::size_t> seq, const HBRelation& hb) {
  // seq[y] precedes some earlier seq[x] iff its response comes before the
  // latest invocation seen so far.
  bool any = false;
  std::uint64_t max_inv = 0;
  for (std::size_t x : seq) {
    if (any && hb.ret(x) < max_inv) return false;
    max_inv = any ? std::max(max_inv, hb.inv(x)) : hb.inv(x);
    any = true;
  }
  return true;
}

std::vector<std::size_t> insert_preserving(std::span<const std::size_t> seq, std::size_t x,
                                           const HBRelation& hb) {
  if (!is_linear_extension(seq, hb)) {
    throw PrecedenceCycle("input sequence does not preserve happened-before");
  }
  std::size_t pos = 0;
  for (std::size_t i = seq.size(); i > 0; --i) {
    if (hb.precedes(seq[i - 1], x)) {
      pos = i;
      break;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(seq.size() + 1);
  out.insert(out.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(pos));
  out.push_back(x);
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(pos), seq.end());
  return out;
}

std::vector<std::size_t> to_indices(const History& h, std::span<const OpId> ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (OpId id : ids) out.push_back(h.require_index(id));
  return out;
}

std::vector<OpId> to_ids(const History& h, std::span<const std::size_t> indices) {
  std::vector<OpId> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(h.op(i).id);
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
std::optional<T> parse_uint(std::string_view token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw HistoryError(HistoryErrorKind::MalformedLine, line, why);
}

}  // namespace

ParsedHistory parse_history(std::string_view text) {
  std::vector<Event> events;
  std::map<OpId, std::uint64_t> removal;
  std::set<OpId> eliminated;
  std::set<std::uint64_t> ranks;

  struct OpInfo {
    std::size_t inv_line;
    Method method;
    std::string thread;
    bool returned = false;
  };
  std::unordered_map<OpId, OpInfo> ops;
  std::unordered_set<std::string> push_values;

  bool header_seen = false;
  bool metadata_started = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tok = split_tokens(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!header_seen) {
      if (tok.size() != 2 || tok[0] != "stacklin-history" || tok[1] != "v1") {
        malformed(line_no, "expected header '" + std::string(kHistoryHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    const std::string_view kind = tok[0];
    if (kind == "inv" || kind == "ret") {
      if (metadata_started) malformed(line_no, "event after metadata lines");
      if (tok.size() < 3) malformed(line_no, "too few fields");
      auto op = parse_uint<OpId>(tok[1]);
      if (!op) malformed(line_no, "bad operation id '" + std::string(tok[1]) + "'");
      Event e;
      e.seq = events.size();
      e.thread = std::string(tok[2]);
      e.op = *op;
      if (kind == "inv") {
        e.kind = EventKind::Inv;
        if (tok.size() >= 4 && tok[3] == "push") {
          if (tok.size() != 5) malformed(line_no, "push invocation needs exactly one value");
          if (tok[4] == "empty") malformed(line_no, "'empty' is reserved");
          e.method = Method::Push;
          e.value = std::string(tok[4]);
        } else if (tok.size() == 4 && tok[3] == "pop") {
          e.method = Method::Pop;
        } else {
          malformed(line_no, "expected 'push <value>' or 'pop'");
        }
        if (ops.contains(*op)) {
          throw HistoryError(HistoryErrorKind::DuplicateOpId, line_no,
                             "operation " + std::to_string(*op) + " invoked twice");
        }
        if (e.method == Method::Push && !push_values.insert(*e.value).second) {
          throw HistoryError(HistoryErrorKind::DuplicatePushValue, line_no,
                             "value " + *e.value + " pushed twice");
        }
        ops.emplace(*op, OpInfo{line_no, e.method, e.thread});
      } else {
        e.kind = EventKind::Ret;
        auto it = ops.find(*op);
        if (it == ops.end() || it->second.returned) {
          throw HistoryError(HistoryErrorKind::RetWithoutInv, line_no,
                             "response of operation " + std::to_string(*op) +
                                 " without a pending invocation");
        }
        if (it->second.thread != e.thread) {
          throw HistoryError(HistoryErrorKind::RetWithoutInv, line_no,
                             "response thread " + e.thread + " differs from invoking thread " +
                                 it->second.thread);
        }
        e.method = it->second.method;
        if (e.method == Method::Push) {
          if (tok.size() != 3) malformed(line_no, "push response carries no value");
        } else {
          if (tok.size() != 4) malformed(line_no, "pop response needs a value or 'empty'");
          if (tok[3] == "empty") {
            e.empty = true;
          } else {
            e.value = std::string(tok[3]);
          }
        }
        it->second.returned = true;
      }
      events.push_back(std::move(e));
    } else if (kind == "rm") {
      metadata_started = true;
      if (tok.size() != 3) malformed(line_no, "expected 'rm <op-id> <rank>'");
      auto op = parse_uint<OpId>(tok[1]);
      auto rank = parse_uint<std::uint64_t>(tok[2]);
      if (!op || !rank) malformed(line_no, "bad removal metadata");
      auto it = ops.find(*op);
      if (it == ops.end() || it->second.method != Method::Pop) {
        malformed(line_no, "removal rank for unknown or non-pop operation");
      }
      if (!removal.emplace(*op, *rank).second) malformed(line_no, "duplicate removal rank");
      if (!ranks.insert(*rank).second) malformed(line_no, "rank used twice");
    } else if (kind == "elim") {
      metadata_started = true;
      if (tok.size() != 2) malformed(line_no, "expected 'elim <op-id>'");
      auto op = parse_uint<OpId>(tok[1]);
      if (!op) malformed(line_no, "bad elimination marker");
      auto it = ops.find(*op);
      if (it == ops.end() || it->second.method != Method::Pop) {
        malformed(line_no, "elimination marker for unknown or non-pop operation");
      }
      eliminated.insert(*op);
    } else {
      malformed(line_no, "unknown record '" + std::string(kind) + "'");
    }
  }
  if (!header_seen) malformed(1, "missing header");

  ParsedHistory out;
  out.history = History::from_events(std::move(events), std::move(removal), std::move(eliminated));
  out.warnings = out.history.warnings();
  return out;
}

std::string emit_history(const History& h) {
  std::ostringstream out;
  out << kHistoryHeader << '\n';
  for (const Event& e : h.events()) {
    if (e.kind == EventKind::Inv) {
      out << "inv " << e.op << ' ' << e.thread;
      if (e.method == Method::Push) {
        out << " push " << e.value.value_or("");
      } else {
        out << " pop";
      }
    } else {
      out << "ret " << e.op << ' ' << e.thread;
      if (e.method == Method::Pop) {
        if (e.empty) {
          out << " empty";
        } else {
          out << ' ' << e.value.value_or("");
        }
      }
    }
    out << '\n';
  }
  std::vector<std::pair<std::uint64_t, OpId>> by_rank;
  for (const auto& [op, rank] : h.removal_order()) by_rank.emplace_back(rank, op);
  std::sort(by_rank.begin(), by_rank.end());
  for (const auto& [rank, op] : by_rank) out << "rm " << op << ' ' << rank << '\n';
  for (OpId op : h.eliminated()) out << "elim " << op << '\n';
  return out.str();
}

ParsedHistory read_history_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_history(buf.str());
}

void write_history_file(const std::string& path, const History& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << emit_history(h);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace stacklin
