#ifndef STACKLIN_PIPELINE_HPP
#define STACKLIN_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "stacklin/checker.hpp"
#include "stacklin/history.hpp"
#include "stacklin/reduction.hpp"
#include "stacklin/verdict.hpp"

namespace stacklin {

enum class PopOrderSource {
  Recorded,  // removal ranks
  Search,    // any order passing the conditions
};

const char* to_string(PopOrderSource source);
std::optional<PopOrderSource> parse_pop_order_source(const std::string& s);

struct PipelineOptions {
  bool strip_elimination = true;
  PopOrderSource pop_order = PopOrderSource::Search;
  CheckOptions check;
};

/// Everything the full decision produced, for reporting.
struct PipelineResult {
  Verdict verdict;
  std::vector<EliminationPair> pairs;
  /// Pop order the checker used, when one was available.
  std::optional<PopOrder> order;
  /// How the witness was obtained, when there is one.
  std::optional<WitnessReport> witness;
};

/// match -> strip -> check -> linearize -> re-insert pairs. A LINEARIZABLE
/// verdict carries a certified witness of the original history.
/// Throws PopOrderError for unusable removal metadata and
/// SearchBoundExceeded when the search bound is hit.
PipelineResult run_pipeline(const History& h, const PipelineOptions& options = {});

}  // namespace stacklin

#endif  // STACKLIN_PIPELINE_HPP
