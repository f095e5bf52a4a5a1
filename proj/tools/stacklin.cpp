// stacklin: record, check and fuzz concurrent stack histories.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stacklin/bench.hpp"
#include "stacklin/fuzz.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "stacklin/stacks/recorder.hpp"

using namespace stacklin;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kInternal = 3 };

struct DecideFlags {
  std::string file;
  bool strip = true;
  std::string pop_order = "auto";
  std::size_t max_search_pops = 10;
  std::string rules = "stated";
  std::string witness = "fallback";
  std::string report = "text";
};

void add_decide_flags(CLI::App* cmd, DecideFlags& f, bool with_report) {
  cmd->add_option("file", f.file, "history file")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--strip-elim,!--no-strip-elim", f.strip, "remove elimination pairs before checking (default on)");
  cmd->add_option("--pop-order", f.pop_order, "recorded, search, or auto (recorded when the file has removal ranks)")
      ->check(CLI::IsMember({"auto", "recorded", "search"}));
  cmd->add_option("--max-search-pops", f.max_search_pops, "largest pop count any order search accepts");
  cmd->add_option("--rules", f.rules, "condition rules")->check(CLI::IsMember({"stated", "strengthened"}));
  cmd->add_option("--witness", f.witness, "witness construction")->check(CLI::IsMember({"pushes-first", "fallback"}));
  if (with_report) cmd->add_option("--report", f.report)->check(CLI::IsMember({"text", "json"}));
}

PipelineOptions pipeline_options(const DecideFlags& f, const History& h) {
  PipelineOptions o;
  o.strip_elimination = f.strip;
  if (f.pop_order == "auto") {
    o.pop_order = h.removal_order().empty() ? PopOrderSource::Search : PopOrderSource::Recorded;
  } else {
    o.pop_order = *parse_pop_order_source(f.pop_order);
  }
  o.check.max_pops = f.max_search_pops;
  o.check.rules = f.rules == "stated" ? ConditionRules::Stated : ConditionRules::Strengthened;
  o.check.witness = f.witness == "fallback" ? WitnessStrategy::Fallback : WitnessStrategy::PushesFirst;
  return o;
}

std::string join(const std::vector<OpId>& ids, const char* sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? sep : "") << ids[i];
  return out.str();
}

json verdict_json(const Verdict& v) {
  json j;
  j["result"] = v.linearizable ? "LINEARIZABLE" : "VIOLATION";
  j["failed_condition"] = v.violation ? json(to_string(v.violation->condition)) : json(nullptr);
  j["pop_index"] = v.violation && v.violation->pop_index ? json(*v.violation->pop_index) : json(nullptr);
  j["ops"] = v.violation ? json(v.violation->ops) : json::array();
  j["witness"] = v.witness;
  j["warnings"] = v.warnings;
  if (v.violation) j["detail"] = v.violation->detail;
  return j;
}

void print_verdict_text(const Verdict& v) {
  for (const std::string& w : v.warnings) std::cerr << "warning: " << w << '\n';
  if (v.linearizable) {
    std::cout << "LINEARIZABLE\nwitness: " << join(v.witness, " ") << '\n';
    return;
  }
  std::cout << "VIOLATION " << to_string(v.violation->condition);
  if (v.violation->pop_index) std::cout << " at pop index " << *v.violation->pop_index;
  std::cout << "\n" << v.violation->detail << '\n';
}

History load(const std::string& path) {
  ParsedHistory p = read_history_file(path);
  return std::move(p.history);
}

int run_check(const DecideFlags& f) {
  const History h = load(f.file);
  const PipelineOptions o = pipeline_options(f, h);
  const PipelineResult r = run_pipeline(h, o);
  if (f.report == "json") {
    json j = verdict_json(r.verdict);
    json c;
    c["pop_order_source"] = to_string(o.pop_order);
    c["rules"] = to_string(o.check.rules);
    c["elimination_pairs"] = json::array();
    for (const EliminationPair& p : r.pairs) c["elimination_pairs"].push_back({p.push, p.pop});
    if (r.order) c["pop_order"] = r.order->pops;
    if (r.witness) {
      c["witness_source"] = to_string(r.witness->source);
      c["moves"] = r.witness->moves;
    }
    j["construction"] = c;
    std::cout << j.dump(2) << '\n';
  } else {
    print_verdict_text(r.verdict);
    if (r.witness) std::cout << "construction: " << to_string(r.witness->source) << '\n';
  }
  return r.verdict.linearizable ? kOk : kViolation;
}

int run_lin(const DecideFlags& f) {
  const History h = load(f.file);
  const PipelineResult r = run_pipeline(h, pipeline_options(f, h));
  if (r.verdict.linearizable) {
    for (OpId id : r.verdict.witness) std::cout << id << '\n';
    return kOk;
  }
  print_verdict_text(r.verdict);
  return kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearizability checking for concurrent stack histories"};
  app.require_subcommand(1);

  // record
  stacks::StressOptions rec;
  std::string rec_impl = "treiber", rec_out, rec_report = "text";
  double yield = rec.yield_probability;
  auto* record = app.add_subcommand("record", "run a stack under stress and write its history");
  record->add_option("--impl", rec_impl)->check(CLI::IsMember({"treiber", "hsy", "ts"}));
  record->add_option("--threads", rec.threads)->check(CLI::PositiveNumber);
  record->add_option("--ops", rec.ops, "operations per thread")->check(CLI::PositiveNumber);
  record->add_option("--pop-ratio", rec.pop_ratio)->check(CLI::Range(0.0, 1.0));
  record->add_option("--seed", rec.seed);
  record->add_option("--yield-prob", yield, "chance of a yield at each instrumented point")->check(CLI::Range(0.0, 1.0));
  record->add_option("--out", rec_out, "history file")->required();
  record->add_option("--report", rec_report)->check(CLI::IsMember({"text", "json"}));

  DecideFlags check_flags, lin_flags;
  auto* check = app.add_subcommand("check", "decide a history with the condition checker");
  add_decide_flags(check, check_flags, true);
  auto* lin = app.add_subcommand("lin", "print a witness, one op id per line");
  add_decide_flags(lin, lin_flags, false);

  std::string oracle_file, oracle_report = "text";
  std::size_t oracle_max = 12;
  auto* oracle = app.add_subcommand("oracle", "decide a history by exhaustive search");
  oracle->add_option("file", oracle_file)->required()->check(CLI::ExistingFile);
  oracle->add_option("--max-ops", oracle_max);
  oracle->add_option("--report", oracle_report)->check(CLI::IsMember({"text", "json"}));

  FuzzConfig fz;
  std::string fz_report = "text";
  auto* fuzz_cmd = app.add_subcommand("fuzz", "compare checker and oracle on random histories");
  fuzz_cmd->add_option("--trials", fz.trials);
  fuzz_cmd->add_option("--max-ops", fz.max_ops)->check(CLI::Range(std::size_t{1}, kMaxFuzzOps));
  fuzz_cmd->add_option("--seed", fz.seed);
  fuzz_cmd->add_flag("--mutate", fz.mutate, "mutate every history before deciding it");
  fuzz_cmd->add_option("--recorded-share", fz.recorded_share, "share of trials taken from real stack runs")
      ->check(CLI::Range(0.0, 1.0));
  fuzz_cmd->add_option("--workers", fz.workers);
  fuzz_cmd->add_option("--out", fz.out_dir, "directory for disagreeing histories");
  fuzz_cmd->add_option("--report", fz_report)->check(CLI::IsMember({"text", "json"}));

  BenchOptions bo;
  std::string bench_impl = "treiber", bench_out, bench_family = "recorded";
  auto* bench_cmd = app.add_subcommand("bench", "time checker and oracle across history sizes");
  bench_cmd->add_option("--family", bench_family, "history shape to time")
      ->check(CLI::IsMember({"recorded", "inverted", "concurrent-pushes"}));
  bench_cmd->add_option("--threads", bo.threads)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--impl", bench_impl)->check(CLI::IsMember({"treiber", "hsy", "ts"}));
  bench_cmd->add_option("--sizes", bo.sizes, "ascending operation counts")->delimiter(',');
  bench_cmd->add_option("--seed", bo.seed);
  bench_cmd->add_option("--repeats", bo.repeats)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--oracle-max-ops", bo.oracle_max_ops);
  bench_cmd->add_option("--pop-ratio", bo.pop_ratio)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--yield-prob", bo.yield_probability)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_flag("--oracle-memo", bo.oracle_memoize, "let the oracle remember failed states");
  bench_cmd->add_option("--out", bench_out, "TSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*record) {
      rec.impl = *stacks::parse_stack_kind(rec_impl);
      rec.yield_probability = yield;
      const stacks::Recording r = stacks::record_stress(rec);
      write_history_file(rec_out, r.history);
      if (rec_report == "json") {
        json j{{"impl", rec_impl},
               {"ops", r.history.size()},
               {"pops", r.history.pop_indices().size()},
               {"ranked", r.history.removal_order().size()},
               {"eliminated", r.history.eliminated().size()},
               {"out", rec_out}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "recorded " << r.history.size() << " ops (" << r.history.pop_indices().size() << " pops, "
                  << r.history.eliminated().size() << " eliminated) to " << rec_out << '\n';
      }
      return kOk;
    }
    if (*check) return run_check(check_flags);
    if (*lin) return run_lin(lin_flags);
    if (*oracle) {
      const History h = load(oracle_file);
      Verdict v = oracle_check(h, OracleOptions{oracle_max});
      v.warnings = h.warnings();
      if (oracle_report == "json") {
        std::cout << verdict_json(v).dump(2) << '\n';
      } else {
        print_verdict_text(v);
      }
      return v.linearizable ? kOk : kViolation;
    }
    if (*fuzz_cmd) {
      const FuzzReport r = fuzz(fz);
      if (fz_report == "json") {
        json j{{"trials", r.trials},           {"agreements", r.agreements}, {"disagreements", r.disagreements},
               {"linearizable", r.linearizable}, {"recorded", r.recorded},     {"mutated", r.mutated},
               {"false_accepts", r.false_accepts}, {"violations", r.violations}, {"mutations", r.mutations},
               {"persisted", r.persisted}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "trials " << r.trials << ", agreements " << r.agreements << ", disagreements "
                  << r.disagreements << ", oracle-linearizable " << r.linearizable << ", recorded " << r.recorded
                  << ", mutated " << r.mutated << ", false accepts " << r.false_accepts << '\n';
        for (const auto& [label, n] : r.violations) std::cout << "  violation " << label << ": " << n << '\n';
        for (const auto& [m, n] : r.mutations) std::cout << "  mutation " << m << ": " << n << '\n';
        for (const std::string& p : r.persisted) std::cout << "  saved " << p << '\n';
      }
      return r.disagreements == 0 ? kOk : kViolation;
    }
    if (*bench_cmd) {
      bo.impl = *stacks::parse_stack_kind(bench_impl);
      bo.family = *parse_bench_family(bench_family);
      const std::string tsv = bench_tsv(bench(bo));
      if (bench_out.empty()) {
        std::cout << tsv;
      } else {
        std::ofstream(bench_out) << tsv;
      }
      return kOk;
    }
  } catch (const InternalInvariantBroken& e) {
    std::cerr << "internal invariant broken: " << e.what() << '\n';
    return kInternal;
  } catch (const stacks::HarnessTimeout& e) {
    std::cerr << "harness timeout: " << e.what() << '\n';
    return kInternal;
  } catch (const HistoryError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const PopOrderError& e) {
    std::cerr << "pop order error: " << e.what() << '\n';
    return kUsage;
  } catch (const SearchBoundExceeded& e) {
    std::cerr << "search bound exceeded: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
