#ifndef STACKLIN_STACKS_NODE_ARENA_HPP
#define STACKLIN_STACKS_NODE_ARENA_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>

namespace stacklin::stacks {

/// Append-only node storage addressed by 32-bit index; index 0 is null.
/// Nodes live until the arena dies, so a stale index never dangles.
template <typename Node>
class NodeArena {
 public:
  static constexpr std::uint32_t kChunkBits = 12;
  static constexpr std::uint32_t kChunkSize = 1U << kChunkBits;
  static constexpr std::uint32_t kMaxChunks = 1U << 14;

  NodeArena() = default;
  NodeArena(const NodeArena&) = delete;
  NodeArena& operator=(const NodeArena&) = delete;
  ~NodeArena() {
    for (auto& c : chunks_) delete[] c.load();
  }

  std::uint32_t allocate() {
    const std::uint32_t idx = next_.fetch_add(1);
    const std::uint32_t chunk = idx >> kChunkBits;
    if (chunk >= kMaxChunks) throw std::length_error("node arena exhausted");
    if (!chunks_[chunk].load()) {
      Node* fresh = new Node[kChunkSize];
      Node* expected = nullptr;
      if (!chunks_[chunk].compare_exchange_strong(expected, fresh)) delete[] fresh;
    }
    return idx;
  }

  Node& operator[](std::uint32_t idx) { return chunks_[idx >> kChunkBits].load()[idx & (kChunkSize - 1)]; }

 private:
  std::atomic<std::uint32_t> next_{1};
  std::array<std::atomic<Node*>, kMaxChunks> chunks_{};
};

/// A top-of-list word: node index in the low half, ABA counter in the high half.
struct TopWord {
  static std::uint64_t pack(std::uint32_t idx, std::uint32_t counter) {
    return (std::uint64_t{counter} << 32) | idx;
  }
  static std::uint32_t index(std::uint64_t w) { return static_cast<std::uint32_t>(w); }
  static std::uint32_t counter(std::uint64_t w) { return static_cast<std::uint32_t>(w >> 32); }
  static std::uint64_t replace(std::uint64_t w, std::uint32_t idx) { return pack(idx, counter(w) + 1); }
};

}  // namespace stacklin::stacks

#endif  // STACKLIN_STACKS_NODE_ARENA_HPP
