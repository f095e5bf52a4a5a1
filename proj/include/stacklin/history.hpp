#ifndef STACKLIN_HISTORY_HPP
#define STACKLIN_HISTORY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stacklin {

using OpId = std::uint64_t;

enum class Method : std::uint8_t { Push, Pop };
enum class EventKind : std::uint8_t { Inv, Ret };

/// One invocation or response. `method` is meaningful on INV events only.
/// `value` carries the pushed argument on a push INV and the returned token
/// on a pop RET; `empty` marks a pop RET that observed an empty stack.
struct Event {
  std::uint64_t seq = 0;
  std::string thread;
  EventKind kind = EventKind::Inv;
  OpId op = 0;
  Method method = Method::Push;
  std::optional<std::string> value;
  bool empty = false;

  friend bool operator==(const Event&, const Event&) = default;
};

/// A complete method call: the pairing of an INV with its RET.
struct Operation {
  OpId id = 0;
  std::string thread;
  Method method = Method::Push;
  /// Pushed argument, or the value a pop returned. Unused when `returns_empty`.
  std::string value;
  bool returns_empty = false;
  std::uint64_t inv_seq = 0;
  std::uint64_t ret_seq = 0;

  bool is_push() const { return method == Method::Push; }
  bool is_pop() const { return method == Method::Pop; }
  bool is_empty_pop() const { return is_pop() && returns_empty; }

  friend bool operator==(const Operation&, const Operation&) = default;
};

enum class HistoryErrorKind {
  MalformedLine,
  DuplicateOpId,
  RetWithoutInv,
  DuplicatePushValue,
};

const char* to_string(HistoryErrorKind kind);

class HistoryError : public std::runtime_error {
 public:
  HistoryError(HistoryErrorKind kind, std::size_t line, const std::string& what);

  HistoryErrorKind kind() const { return kind_; }
  /// 1-based line of the history file, or 0 when not parsing a file.
  std::size_t line() const { return line_; }

 private:
  HistoryErrorKind kind_;
  std::size_t line_;
};

/// Thrown by algorithms whose input sequence already contradicts
/// happened-before.
class PrecedenceCycle : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A complete history of stack operations.
///
/// Construction sorts events by their sequence number, drops pending
/// invocations (one warning each), and renumbers sequence numbers densely
/// from 0. Only the relative order of events is meaningful, so the
/// renumbering keeps happened-before intact and makes histories compare
/// equal after a round trip through the text format.
///
/// Operations are indexed by position in `ops()`, which is ascending by
/// invocation. Every algorithm in this library works on those indices and
/// converts to `OpId` only at its boundary.
class History {
 public:
  History() = default;

  /// `removal_order` maps pop ids to removal ranks; `eliminated` holds pop
  /// ids the recorder saw complete by value exchange. Entries that refer to
  /// dropped pending operations are discarded with a warning.
  static History from_events(std::vector<Event> events,
                             std::map<OpId, std::uint64_t> removal_order = {},
                             std::set<OpId> eliminated = {});

  std::span<const Event> events() const { return events_; }
  std::span<const Operation> ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  const Operation& op(std::size_t index) const { return ops_[index]; }
  std::optional<std::size_t> index_of(OpId id) const;
  /// Throws std::out_of_range for unknown ids.
  std::size_t require_index(OpId id) const;
  const Operation& op_by_id(OpId id) const { return ops_[require_index(id)]; }

  const std::vector<std::size_t>& push_indices() const { return pushes_; }
  const std::vector<std::size_t>& pop_indices() const { return pops_; }

  const std::map<OpId, std::uint64_t>& removal_order() const { return removal_order_; }
  const std::set<OpId>& eliminated() const { return eliminated_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Subsequence of events belonging to the operations in `keep`; metadata
  /// is restricted to the survivors.
  History restrict_to(const std::set<OpId>& keep) const;

  /// The longest prefix of the event stream in which at most `max_ops`
  /// operations complete, with the operations still pending there dropped.
  History prefix(std::size_t max_ops) const;

  /// Same history with different removal metadata. Used by mutation tests.
  History with_removal_order(std::map<OpId, std::uint64_t> removal_order) const;

  /// Structural equality: events and metadata, ignoring warnings.
  friend bool operator==(const History& a, const History& b) {
    return a.events_ == b.events_ && a.removal_order_ == b.removal_order_ &&
           a.eliminated_ == b.eliminated_;
  }

 private:
  std::vector<Event> events_;
  std::vector<Operation> ops_;
  std::unordered_map<OpId, std::size_t> index_;
  std::vector<std::size_t> pushes_;
  std::vector<std::size_t> pops_;
  std::map<OpId, std::uint64_t> removal_order_;
  std::set<OpId> eliminated_;
  std::vector<std::string> warnings_;
};

/// Happened-before over the operations of one history, addressed by
/// operation index. a precedes b iff a's response comes before b's
/// invocation. Holds its own copy of the interval endpoints.
class HBRelation {
 public:
  HBRelation() = default;
  explicit HBRelation(const History& h);

  std::size_t size() const { return inv_.size(); }
  bool precedes(std::size_t a, std::size_t b) const { return ret_[a] < inv_[b]; }
  bool interleaved(std::size_t a, std::size_t b) const {
    return !precedes(a, b) && !precedes(b, a);
  }
  std::uint64_t inv(std::size_t a) const { return inv_[a]; }
  std::uint64_t ret(std::size_t a) const { return ret_[a]; }

 private:
  std::vector<std::uint64_t> inv_;
  std::vector<std::uint64_t> ret_;
};

HBRelation happened_before(const History& h);

/// True iff no later element of `seq` happened-before an earlier one.
bool is_linear_extension(std::span<const std::size_t> seq, const HBRelation& hb);

/// Inserts `x` right after the rightmost element that happened-before it, or
/// at the front when there is none. Throws PrecedenceCycle if `seq` does not
/// already preserve `hb`.
std::vector<std::size_t> insert_preserving(std::span<const std::size_t> seq, std::size_t x,
                                           const HBRelation& hb);

/// Converts between operation ids and indices of `h`.
std::vector<std::size_t> to_indices(const History& h, std::span<const OpId> ids);
std::vector<OpId> to_ids(const History& h, std::span<const std::size_t> indices);

// History text format.

inline constexpr std::string_view kHistoryHeader = "stacklin-history v1";

struct ParsedHistory {
  History history;
  std::vector<std::string> warnings;
};

/// Parses the `stacklin-history v1` format. Throws HistoryError.
ParsedHistory parse_history(std::string_view text);
std::string emit_history(const History& h);

ParsedHistory read_history_file(const std::string& path);
void write_history_file(const std::string& path, const History& h);

}  // namespace stacklin

#endif  // STACKLIN_HISTORY_HPP
