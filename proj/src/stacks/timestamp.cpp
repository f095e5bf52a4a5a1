#include "stacklin/stacks/timestamp.hpp"

#include "stacklin/stacks/clock.hpp"

namespace stacklin::stacks {

std::string Timestamp::to_string() const {
  if (is_top()) return "top";
  return "[" + std::to_string(start) + "," + std::to_string(end) + "]";
}

bool ts_less(Timestamp a, Timestamp b) {
  if (a.is_top()) return false;
  if (b.is_top()) return true;
  return a.end < b.start;
}

Timestamp IntervalClock::generate(const std::function<void()>& between) {
  Timestamp t;
  t.start = next_.fetch_add(1);
  yield_point();
  if (between) between();
  t.end = next_.fetch_add(1);
  return t;
}

}  // namespace stacklin::stacks
