#include "sigraph/vertex_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace sigraph {

namespace {
std::size_t word_count(std::size_t universe) { return (universe + 63) / 64; }
}  // namespace

VertexSet::VertexSet(std::size_t universe) : universe_(universe), words_(word_count(universe), 0) {}

VertexSet VertexSet::full(std::size_t universe) {
  std::vector<std::uint64_t> words(word_count(universe), ~std::uint64_t{0});
  if (universe % 64 != 0 && !words.empty()) {
    words.back() = (std::uint64_t{1} << (universe % 64)) - 1;
  }
  return from_words(universe, std::move(words));
}

VertexSet VertexSet::from_members(std::size_t universe, std::span<const VertexId> members) {
  std::vector<std::uint64_t> words(word_count(universe), 0);
  for (VertexId v : members) {
    if (v >= universe) throw std::out_of_range("vertex id out of range in vertex set");
    words[v >> 6] |= std::uint64_t{1} << (v & 63);
  }
  return from_words(universe, std::move(words));
}

VertexSet VertexSet::from_words(std::size_t universe, std::vector<std::uint64_t> words) {
  VertexSet s;
  s.universe_ = universe;
  s.words_ = std::move(words);
  std::size_t count = 0;
  for (auto w : s.words_) count += static_cast<std::size_t>(std::popcount(w));
  s.members_.reserve(count);
  for (std::size_t i = 0; i < s.words_.size(); ++i) {
    std::uint64_t w = s.words_[i];
    while (w != 0) {
      const int bit = std::countr_zero(w);
      s.members_.push_back(static_cast<VertexId>(i * 64 + static_cast<std::size_t>(bit)));
      w &= w - 1;
    }
  }
  return s;
}

VertexSet VertexSet::intersect(const VertexSet& other) const {
  if (universe_ != other.universe_) throw std::invalid_argument("vertex sets over different universes");
  std::vector<std::uint64_t> words(words_.size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = words_[i] & other.words_[i];
  return from_words(universe_, std::move(words));
}

VertexSet VertexSet::complement() const {
  auto all = full(universe_);
  std::vector<std::uint64_t> words(words_.size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = all.words_[i] & ~words_[i];
  return from_words(universe_, std::move(words));
}

std::size_t VertexSet::intersection_size(const VertexSet& other) const {
  if (universe_ != other.universe_) throw std::invalid_argument("vertex sets over different universes");
  std::size_t count = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    count += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return count;
}

bool VertexSet::disjoint(const VertexSet& other) const { return intersection_size(other) == 0; }

}  // namespace sigraph
