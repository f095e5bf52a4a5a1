#include "stacklin/generate.hpp"

#include <algorithm>

namespace stacklin {

namespace {

std::string value_name(std::size_t k) { return "v" + std::to_string(k); }

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& from) {
  std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
  return from[d(rng)];
}

}  // namespace

History random_history(std::mt19937_64& rng, const SyntheticOptions& options) {
  const std::size_t n = options.ops;
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  ValueMode mode = options.mode;
  if (mode == ValueMode::Mixed) {
    mode = std::bernoulli_distribution(0.5)(rng) ? ValueMode::Simulated : ValueMode::Random;
  }
  std::bernoulli_distribution is_pop(options.pop_ratio);

  enum class Phase { Invoked, Linearized };
  struct Live {
    std::size_t op;
    std::size_t thread;
    Phase phase;
  };

  std::vector<Event> events;
  std::vector<Method> method(n);
  std::vector<std::optional<std::string>> result(n);  // pop results; nullopt = EMPTY
  std::vector<std::size_t> ret_event(n);
  std::vector<std::string> push_value(n);
  std::vector<std::string> stack;
  std::vector<std::string> pushed;
  std::vector<Live> live;
  std::vector<char> busy(threads, 0);
  std::size_t started = 0;
  std::size_t pushes = 0;

  while (started < n || !live.empty()) {
    // Candidate actions: 0 = invoke, 1 = linearize, 2 = return.
    std::vector<int> actions;
    if (started < n && std::count(busy.begin(), busy.end(), 0) > 0) actions.push_back(0);
    for (const Live& l : live) actions.push_back(l.phase == Phase::Invoked ? 1 : 2);
    const int action = pick(rng, actions);

    if (action == 0) {
      std::vector<std::size_t> idle;
      for (std::size_t t = 0; t < threads; ++t) {
        if (!busy[t]) idle.push_back(t);
      }
      const std::size_t t = pick(rng, idle);
      busy[t] = 1;
      const std::size_t op = started++;
      Event e;
      e.seq = events.size();
      e.thread = "t" + std::to_string(t);
      e.kind = EventKind::Inv;
      e.op = op + 1;
      e.method = is_pop(rng) ? Method::Pop : Method::Push;
      if (e.method == Method::Push) {
        e.value = value_name(pushes++);
        pushed.push_back(*e.value);
        push_value[op] = *e.value;
      }
      method[op] = e.method;
      events.push_back(std::move(e));
      live.push_back({op, t, Phase::Invoked});
      continue;
    }

    std::vector<std::size_t> which;
    for (std::size_t i = 0; i < live.size(); ++i) {
      if ((action == 1) == (live[i].phase == Phase::Invoked)) which.push_back(i);
    }
    const std::size_t li = pick(rng, which);
    Live& l = live[li];
    if (action == 1) {
      if (method[l.op] == Method::Push) {
        stack.push_back(push_value[l.op]);
      } else if (!stack.empty()) {
        result[l.op] = stack.back();
        stack.pop_back();
      }
      l.phase = Phase::Linearized;
      continue;
    }

    Event e;
    e.seq = events.size();
    e.thread = "t" + std::to_string(l.thread);
    e.kind = EventKind::Ret;
    e.op = l.op + 1;
    e.method = method[l.op];
    ret_event[l.op] = events.size();
    events.push_back(std::move(e));
    busy[l.thread] = 0;
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(li));
  }

  if (mode == ValueMode::Random) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t op = 0; op < n; ++op) {
      if (method[op] != Method::Pop) continue;
      const double r = u(rng);
      if (r < 0.05) {
        result[op] = "bogus";
      } else if (pushed.empty() || r < 0.25) {
        result[op] = std::nullopt;
      } else {
        result[op] = pick(rng, pushed);
      }
    }
  }
  for (std::size_t op = 0; op < n; ++op) {
    if (method[op] != Method::Pop) continue;
    Event& e = events[ret_event[op]];
    if (result[op]) {
      e.value = result[op];
    } else {
      e.empty = true;
    }
  }
  return History::from_events(std::move(events));
}

namespace {

void enumerate_layouts(std::size_t n, std::vector<std::pair<bool, std::size_t>>& layout,
                       std::size_t invoked, std::vector<std::size_t>& pending,
                       const std::function<void(const std::vector<std::pair<bool, std::size_t>>&)>& emit) {
  if (invoked == n && pending.empty()) {
    emit(layout);
    return;
  }
  if (invoked < n) {
    layout.emplace_back(true, invoked);
    pending.push_back(invoked);
    enumerate_layouts(n, layout, invoked + 1, pending, emit);
    pending.pop_back();
    layout.pop_back();
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const std::size_t op = pending[i];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
    layout.emplace_back(false, op);
    enumerate_layouts(n, layout, invoked, pending, emit);
    layout.pop_back();
    pending.insert(pending.begin() + static_cast<std::ptrdiff_t>(i), op);
  }
}

}  // namespace

std::size_t enumerate_histories(std::size_t ops, const std::function<void(const History&)>& visit) {
  std::size_t count = 0;
  std::vector<std::pair<bool, std::size_t>> layout;  // (is_inv, op)
  std::vector<std::size_t> pending;
  enumerate_layouts(ops, layout, 0, pending, [&](const auto& lay) {
    for (std::uint32_t methods = 0; methods < (1U << ops); ++methods) {
      std::vector<std::size_t> pops;
      std::vector<std::string> values;
      for (std::size_t op = 0; op < ops; ++op) {
        if (methods & (1U << op)) {
          pops.push_back(op);
        } else {
          values.push_back(value_name(op));
        }
      }
      // Each pop picks from EMPTY (0) or one of the pushed values (1..).
      std::vector<std::size_t> choice(pops.size(), 0);
      while (true) {
        std::vector<Event> events;
        for (const auto& [is_inv, op] : lay) {
          Event e;
          e.seq = events.size();
          e.thread = "t" + std::to_string(op);
          e.kind = is_inv ? EventKind::Inv : EventKind::Ret;
          e.op = op + 1;
          const bool pop = methods & (1U << op);
          e.method = pop ? Method::Pop : Method::Push;
          if (is_inv && !pop) e.value = value_name(op);
          if (!is_inv && pop) {
            const std::size_t k = std::find(pops.begin(), pops.end(), op) - pops.begin();
            if (choice[k] == 0) {
              e.empty = true;
            } else {
              e.value = values[choice[k] - 1];
            }
          }
          events.push_back(std::move(e));
        }
        visit(History::from_events(std::move(events)));
        ++count;

        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] > values.size()) choice[k++] = 0;
        if (k == choice.size()) break;
      }
    }
  });
  return count;
}

}  // namespace stacklin
