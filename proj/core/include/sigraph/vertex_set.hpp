#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sigraph {

using VertexId = std::uint32_t;

// Subset of {0..universe-1}. Keeps a bitset for O(1) membership and a sorted
// member list for iteration; both views are always in sync.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe);

  static VertexSet full(std::size_t universe);
  static VertexSet from_members(std::size_t universe, std::span<const VertexId> members);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  bool contains(VertexId v) const {
    return v < universe_ && ((words_[v >> 6] >> (v & 63)) & 1u) != 0;
  }

  std::span<const VertexId> members() const { return members_; }
  std::span<const std::uint64_t> words() const { return words_; }

  VertexSet intersect(const VertexSet& other) const;
  VertexSet complement() const;
  std::size_t intersection_size(const VertexSet& other) const;
  bool disjoint(const VertexSet& other) const;

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  static VertexSet from_words(std::size_t universe, std::vector<std::uint64_t> words);

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<VertexId> members_;
};

}  // namespace sigraph
