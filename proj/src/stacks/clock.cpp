#include "stacklin/stacks/clock.hpp"

#include <thread>

namespace stacklin::stacks {

namespace {
thread_local Jitter* current = nullptr;
}

void Jitter::maybe_yield() {
  if (coin_(rng_)) std::this_thread::yield();
}

void Jitter::install(Jitter* j) { current = j; }

void yield_point() {
  if (current) current->maybe_yield();
}

}  // namespace stacklin::stacks
