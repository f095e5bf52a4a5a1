#include "stacklin/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "stacklin/generate.hpp"
#include "stacklin/oracle.hpp"
#include "stacklin/pipeline.hpp"
#include "stacklin/stacks/recorder.hpp"

namespace stacklin {

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::ValueSwap: return "value-swap";
    case Mutation::RankShuffle: return "rank-shuffle";
    case Mutation::InjectInversion: return "inject-inversion";
  }
  return "?";
}

namespace {

std::vector<Event> copy_events(const History& h) { return {h.events().begin(), h.events().end()}; }

std::optional<History> swap_values(const History& h, std::mt19937_64& rng) {
  std::vector<Event> events = copy_events(h);
  std::vector<std::size_t> rets;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].kind == EventKind::Ret && events[i].method == Method::Pop) rets.push_back(i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t a = 0; a < rets.size(); ++a) {
    for (std::size_t b = a + 1; b < rets.size(); ++b) {
      const Event& x = events[rets[a]];
      const Event& y = events[rets[b]];
      if (x.empty != y.empty || x.value != y.value) candidates.emplace_back(rets[a], rets[b]);
    }
  }
  if (candidates.empty()) return std::nullopt;
  const auto [a, b] = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  std::swap(events[a].value, events[b].value);
  std::swap(events[a].empty, events[b].empty);
  return History::from_events(std::move(events), h.removal_order(), h.eliminated());
}

std::optional<History> shuffle_ranks(const History& h, std::mt19937_64& rng) {
  if (h.removal_order().size() < 2) return std::nullopt;
  std::vector<OpId> pops;
  std::vector<std::uint64_t> ranks;
  for (const auto& [op, rank] : h.removal_order()) {
    pops.push_back(op);
    ranks.push_back(rank);
  }
  const std::vector<std::uint64_t> before = ranks;
  while (ranks == before) std::shuffle(ranks.begin(), ranks.end(), rng);
  std::map<OpId, std::uint64_t> shuffled;
  for (std::size_t i = 0; i < pops.size(); ++i) shuffled[pops[i]] = ranks[i];
  return h.with_removal_order(std::move(shuffled));
}

History inject_inversion(const History& h) {
  std::vector<Event> events = copy_events(h);
  OpId next = 1;
  std::uint64_t rank = 0;
  for (const Operation& op : h.ops()) next = std::max(next, op.id + 1);
  for (const auto& [op, r] : h.removal_order()) rank = std::max(rank, r);
  const std::string a = "inj" + std::to_string(next) + "a";
  const std::string b = "inj" + std::to_string(next) + "b";
  auto add = [&](OpId op, Method method, std::optional<std::string> arg, std::optional<std::string> result) {
    Event inv;
    inv.seq = events.size();
    inv.thread = "inj";
    inv.op = op;
    inv.method = method;
    inv.value = std::move(arg);
    Event ret = inv;
    ret.seq = events.size() + 1;
    ret.kind = EventKind::Ret;
    ret.value = std::move(result);
    events.push_back(std::move(inv));
    events.push_back(std::move(ret));
  };
  add(next, Method::Push, a, std::nullopt);
  add(next + 1, Method::Push, b, std::nullopt);
  add(next + 2, Method::Pop, std::nullopt, a);
  auto removal = h.removal_order();
  if (!removal.empty() || h.pop_indices().empty()) removal[next + 2] = rank + 1;
  return History::from_events(std::move(events), std::move(removal), h.eliminated());
}

History recorded_sample(std::mt19937_64& rng, std::size_t max_ops) {
  stacks::StressOptions o;
  o.impl = static_cast<stacks::StackKind>(std::uniform_int_distribution<int>(0, 2)(rng));
  o.threads = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
  o.ops = (max_ops + o.threads - 1) / o.threads + 1;
  o.seed = rng();
  o.yield_probability = 0.3;
  return stacks::record_stress(o).history.prefix(max_ops);
}

std::string describe(const Verdict& v) {
  if (v.linearizable) return "linearizable";
  return v.violation ? to_string(v.violation->condition) : "violation";
}

}  // namespace

std::optional<History> mutate(const History& h, Mutation m, std::mt19937_64& rng) {
  switch (m) {
    case Mutation::ValueSwap: return swap_values(h, rng);
    case Mutation::RankShuffle: return shuffle_ranks(h, rng);
    case Mutation::InjectInversion: return inject_inversion(h);
  }
  return std::nullopt;
}

FuzzReport fuzz(const FuzzConfig& config) {
  if (config.max_ops > kMaxFuzzOps) {
    throw std::invalid_argument("fuzz: max_ops " + std::to_string(config.max_ops) + " exceeds the oracle bound " +
                                std::to_string(kMaxFuzzOps));
  }
  FuzzReport total;
  total.trials = config.trials;
  if (config.trials == 0) return total;
  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    FuzzReport local;
    std::vector<std::string> persisted;
    for (std::size_t k = next++; k < config.trials; k = next++) {
      std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + k);
      History h;
      if (std::bernoulli_distribution(config.recorded_share)(rng)) {
        h = recorded_sample(rng, config.max_ops);
        ++local.recorded;
      } else {
        SyntheticOptions o;
        o.ops = std::uniform_int_distribution<std::size_t>(1, config.max_ops)(rng);
        o.threads = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        h = random_history(rng, o);
      }
      if (config.mutate) {
        const auto m = static_cast<Mutation>(std::uniform_int_distribution<int>(0, 2)(rng));
        if (auto changed = stacklin::mutate(h, m, rng)) {
          h = *std::move(changed);
          ++local.mutated;
          ++local.mutations[to_string(m)];
        }
      }

      const Verdict oracle = oracle_check(h, OracleOptions{h.size()});
      if (oracle.linearizable) ++local.linearizable;
      bool agree = true;
      std::string checker_label;
      try {
        PipelineOptions search;
        search.check.max_pops = h.size();
        const PipelineResult searched = run_pipeline(h, search);
        checker_label = describe(searched.verdict);
        agree = searched.verdict.linearizable == oracle.linearizable;
        if (searched.verdict.linearizable && !oracle.linearizable) ++local.false_accepts;
        // The recorded order may be rejected, but must never accept wrongly.
        if (!h.removal_order().empty()) {
          PipelineOptions rec = search;
          rec.pop_order = PopOrderSource::Recorded;
          try {
            if (run_pipeline(h, rec).verdict.linearizable && !oracle.linearizable) {
              ++local.false_accepts;
              agree = false;
            }
          } catch (const PopOrderError&) {
          }
        }
      } catch (const std::exception& e) {
        agree = false;
        checker_label = std::string("error: ") + e.what();
      }
      if (!checker_label.empty() && checker_label != "linearizable") ++local.violations[checker_label];
      if (agree) {
        ++local.agreements;
        continue;
      }
      ++local.disagreements;
      if (!config.out_dir.empty()) {
        const std::string path =
            (std::filesystem::path(config.out_dir) / ("disagreement-" + std::to_string(k) + ".hist")).string();
        write_history_file(path, h);
        persisted.push_back(path);
      }
    }
    std::lock_guard lock(mu);
    total.agreements += local.agreements;
    total.disagreements += local.disagreements;
    total.linearizable += local.linearizable;
    total.recorded += local.recorded;
    total.mutated += local.mutated;
    total.false_accepts += local.false_accepts;
    for (const auto& [k, v] : local.violations) total.violations[k] += v;
    for (const auto& [k, v] : local.mutations) total.mutations[k] += v;
    total.persisted.insert(total.persisted.end(), persisted.begin(), persisted.end());
  };

  const std::size_t n = std::min<std::size_t>(
      config.trials, config.workers ? config.workers : std::max(1U, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::sort(total.persisted.begin(), total.persisted.end());
  return total;
}

}  // namespace stacklin
