#ifndef STACKLIN_VERDICT_HPP
#define STACKLIN_VERDICT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stacklin/history.hpp"
#include "stacklin/matching.hpp"

namespace stacklin {

/// Every pop of a history, in an order that never places a pop after one it
/// happened-before.
struct PopOrder {
  std::vector<OpId> pops;

  friend bool operator==(const PopOrder&, const PopOrder&) = default;
};

using WitnessSequence = std::vector<OpId>;

struct Verdict {
  bool linearizable = false;
  /// Full legal sequence when linearizable.
  WitnessSequence witness;
  std::optional<Violation> violation;
  std::vector<std::string> warnings;

  static Verdict accept(WitnessSequence witness) {
    Verdict v;
    v.linearizable = true;
    v.witness = std::move(witness);
    return v;
  }
  static Verdict reject(Violation violation) {
    Verdict v;
    v.violation = std::move(violation);
    return v;
  }
};

/// A constructed witness failed self-certification. Indicates a bug, never
/// a property of the input.
class InternalInvariantBroken : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Exhaustive searches refuse inputs larger than their configured bound.
class SearchBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stacklin

#endif  // STACKLIN_VERDICT_HPP
