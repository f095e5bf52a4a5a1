#include "stacklin/pipeline.hpp"

#include "stacklin/linearizer.hpp"
#include "stacklin/matching.hpp"

namespace stacklin {

const char* to_string(PopOrderSource source) {
  switch (source) {
    case PopOrderSource::Recorded: return "recorded";
    case PopOrderSource::Search: return "search";
  }
  return "?";
}

std::optional<PopOrderSource> parse_pop_order_source(const std::string& s) {
  if (s == "recorded") return PopOrderSource::Recorded;
  if (s == "search") return PopOrderSource::Search;
  return std::nullopt;
}

PipelineResult run_pipeline(const History& h, const PipelineOptions& options) {
  PipelineResult out;
  MatchResult derived = derive_match(h);
  if (auto* v = std::get_if<Violation>(&derived)) {
    out.verdict = Verdict::reject(*v);
    out.verdict.warnings = h.warnings();
    return out;
  }
  const MatchMap& full_match = std::get<MatchMap>(derived);

  const History* target = &h;
  History stripped;
  MatchMap match = full_match;
  if (options.strip_elimination) {
    out.pairs = find_elimination_pairs(h, full_match);
    if (!out.pairs.empty()) {
      stripped = strip(h, out.pairs);
      target = &stripped;
      auto assignment = full_match.assignment();
      for (const EliminationPair& p : out.pairs) assignment.erase(p.pop);
      match = MatchMap(std::move(assignment));
    }
  }

  WitnessReport report;
  if (options.pop_order == PopOrderSource::Search) {
    out.verdict = check_searching(*target, match, options.check, &report);
  } else {
    out.order = pop_order_from_removals(*target);
    out.verdict = check(*target, match, *out.order, options.check, &report);
  }
  if (out.verdict.linearizable) out.witness = report;

  if (out.verdict.linearizable && !out.pairs.empty()) {
    out.verdict.witness = reinsert_elimination_pairs(out.verdict.witness, out.pairs, h);
  }
  out.verdict.warnings = h.warnings();
  return out;
}

}  // namespace stacklin
