#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigraph/background.hpp"
#include "sigraph/description.hpp"
#include "sigraph/graph.hpp"
#include "sigraph/interestingness.hpp"

namespace sigraph {

struct SearchProgress {
  int round = 0;             // 1-based outer round
  std::size_t candidate = 0; // 1-based index of the outer candidate within the round
  std::size_t total = 0;     // outer candidates in the round
  std::string description;   // rendering of the outer candidate
};

struct SearchConfig {
  std::size_t beam_width = 20;
  std::size_t x1 = 8;
  std::size_t x2 = 6;
  int depth = 2;
  bool require_shared_attribute = false;
  bool require_disjoint_extensions = false;
  std::size_t min_extension_size = 1;
  ScoreConstants constants;
  Measure objective = Measure::si;  // single-subgroup search only
  BaselineOptions baseline;
  std::size_t threads = 1;  // 0 = hardware concurrency
  std::function<void(const SearchProgress&)> progress;
  std::function<bool()> cancelled;  // polled between rounds

  // Throws std::invalid_argument when a width or the depth is zero.
  void validate() const;
};

// A pattern with the objective value it was ranked by (SI unless a baseline
// measure was requested).
struct RankedPattern {
  Pattern pattern;
  double score = 0;
};

// Canonical rendering used for tie-breaking and deduplication.
std::string pattern_key(const Pattern& p);

// Strict "ranks before": score descending, then fewer selectors, then the
// lexicographically smaller key.
bool ranks_before(const RankedPattern& a, const RankedPattern& b);

// Fixed-capacity beam. With diversity_floor > 1 the beam additionally keeps at
// least that many distinct W1 descriptions whenever it has seen them.
class Beam {
 public:
  Beam(std::size_t capacity, std::size_t diversity_floor = 0);

  std::size_t capacity() const { return capacity_; }
  std::size_t diversity_floor() const { return floor_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return entries_.size() >= capacity_; }

  // Entries in rank order.
  std::vector<RankedPattern> ranked() const;
  const std::vector<RankedPattern>& entries() const { return entries_; }
  std::size_t distinct_w1() const;
  std::optional<double> min_score() const;

  // Returns true when the candidate entered the beam.
  bool add_if_required(RankedPattern candidate);

 private:
  // Index of the last-ranked entry, optionally among entries whose W1 group
  // has at least two members; npos when there is none.
  std::size_t worst_index(bool over_represented_only) const;
  std::size_t group_size(const Description& w1) const;

  std::size_t capacity_;
  std::size_t floor_;
  std::vector<RankedPattern> entries_;
  std::vector<std::string> keys_;
};

struct SearchResult {
  std::vector<RankedPattern> patterns;  // rank order
  std::size_t evaluated = 0;            // candidates scored
  std::string diagnostic;               // why the result is empty or truncated
};

SearchResult beam_search_single(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg);

// Bi-subgroup search with an inner W2 beam per outer W1 candidate; returns at
// most x1 * x2 patterns.
SearchResult nested_beam_search(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg);

// True when both descriptions constrain a common attribute with different
// selectors.
bool shares_attribute_with_different_value(const Description& w1, const Description& w2);

struct IterationResult {
  std::vector<SearchResult> rounds;
  std::vector<Pattern> absorbed;        // in absorption order
  std::vector<BackgroundModel> models;  // models[0] is the input, one more per absorbed pattern
  std::string diagnostic;
};

IterationResult iterate(const AttributedGraph& g, const BackgroundModel& model0, std::span<const Selector> selectors,
                        const SearchConfig& cfg, int rounds, std::size_t absorb = 1);

}  // namespace sigraph
