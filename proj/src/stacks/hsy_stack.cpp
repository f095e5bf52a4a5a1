#include "stacklin/stacks/hsy_stack.hpp"

#include <algorithm>
#include <thread>

namespace stacklin::stacks {

namespace {

// Slot word: state (2 bits) | version (30 bits) | item (32 bits).
enum State : std::uint64_t { kEmpty = 0, kWaiting = 1, kBusy = 2 };

std::uint64_t pack(std::uint64_t state, std::uint32_t version, std::uint32_t item) {
  return (state << 62) | (std::uint64_t{version & 0x3FFFFFFFU} << 32) | item;
}
std::uint64_t state_of(std::uint64_t w) { return w >> 62; }
std::uint32_t version_of(std::uint64_t w) { return static_cast<std::uint32_t>(w >> 32) & 0x3FFFFFFFU; }
std::uint32_t item_of(std::uint64_t w) { return static_cast<std::uint32_t>(w); }

bool is_push_item(std::uint32_t item) { return item != 0; }

}  // namespace

HsyStack::HsyStack(std::size_t threads, SeqClock& clock, std::size_t slots, std::size_t wait_spins)
    : threads_(threads),
      list_(threads, clock),
      slots_(slots ? slots : std::max<std::size_t>(1, threads / 2)),
      wait_spins_(wait_spins) {
  for (std::size_t t = 0; t < threads; ++t) rng_.emplace_back(0x9E3779B97F4A7C15ULL * (t + 1));
}

std::optional<std::uint32_t> HsyStack::exchange(std::size_t thread, std::uint32_t item) {
  Slot& slot = slots_[std::uniform_int_distribution<std::size_t>(0, slots_.size() - 1)(rng_[thread])];
  std::uint64_t w = slot.word.load();
  const std::uint32_t ver = version_of(w);
  switch (state_of(w)) {
    case kEmpty: {
      const std::uint64_t offer = pack(kWaiting, ver + 1, item);
      if (!slot.word.compare_exchange_strong(w, offer)) return std::nullopt;
      for (std::size_t spin = 0; spin < wait_spins_; ++spin) {
        const std::uint64_t now = slot.word.load();
        if (now != offer) {
          // Only a partner can move the slot off our offer, to BUSY.
          slot.word.store(pack(kEmpty, version_of(now) + 1, 0));
          return item_of(now);
        }
        std::this_thread::yield();
      }
      std::uint64_t expected = offer;
      if (slot.word.compare_exchange_strong(expected, pack(kEmpty, ver + 2, 0))) return std::nullopt;
      slot.word.store(pack(kEmpty, version_of(expected) + 1, 0));
      return item_of(expected);
    }
    case kWaiting: {
      const std::uint32_t theirs = item_of(w);
      if (is_push_item(theirs) == is_push_item(item)) return std::nullopt;
      if (slot.word.compare_exchange_strong(w, pack(kBusy, ver + 1, item))) return theirs;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

PushResult HsyStack::push(std::size_t thread, Value v) {
  const std::uint32_t node = list_.new_node(v);
  while (true) {
    if (fast_path_.load() && list_.try_push(node)) return {};
    yield_point();
    if (exchange(thread, node)) return {};  // partner is a pop: its item is 0
  }
}

PopResult HsyStack::pop(std::size_t thread) {
  for (std::size_t attempts = 1;; ++attempts) {
    if (fast_path_.load()) {
      if (auto r = list_.try_pop()) {
        r->attempts = attempts;
        return *r;
      }
    }
    yield_point();
    if (auto partner = exchange(thread, 0)) {
      PopResult r;
      r.value = list_.value_of(*partner);
      r.eliminated = true;
      r.attempts = attempts;
      eliminations_.fetch_add(1);
      return r;
    }
  }
}

}  // namespace stacklin::stacks
