#include "stacklin/stacks/stack.hpp"

#include "stacklin/stacks/hsy_stack.hpp"
#include "stacklin/stacks/treiber_stack.hpp"
#include "stacklin/stacks/ts_stack.hpp"

namespace stacklin::stacks {

std::string value_name(Value v) {
  return "t" + std::to_string((v >> 32) - 1) + "v" + std::to_string(static_cast<std::uint32_t>(v));
}

const char* to_string(StackKind kind) {
  switch (kind) {
    case StackKind::Treiber:
      return "treiber";
    case StackKind::Hsy:
      return "hsy";
    case StackKind::Ts:
      return "ts";
  }
  return "?";
}

std::optional<StackKind> parse_stack_kind(const std::string& s) {
  if (s == "treiber") return StackKind::Treiber;
  if (s == "hsy") return StackKind::Hsy;
  if (s == "ts") return StackKind::Ts;
  return std::nullopt;
}

std::unique_ptr<ConcurrentStack> make_stack(StackKind kind, std::size_t threads, SeqClock& clock) {
  switch (kind) {
    case StackKind::Treiber:
      return std::make_unique<TreiberStack>(threads, clock);
    case StackKind::Hsy:
      return std::make_unique<HsyStack>(threads, clock);
    case StackKind::Ts:
      return std::make_unique<TsStack>(threads, clock);
  }
  return nullptr;
}

}  // namespace stacklin::stacks
