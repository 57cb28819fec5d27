#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sigraph/background.hpp"
#include "sigraph/description.hpp"
#include "sigraph/graph.hpp"

namespace sigraph {

// I = 0: at least k_W edges (dense). I = 1: at most k_W edges (sparse).
enum class Direction { dense = 0, sparse = 1 };

struct ScoreConstants {
  double alpha = 0.3;  // cost per selector
  double beta = 0.5;   // cost of I and k_W
  PairCounting single_counting = PairCounting::ordered;
  PairCounting bi_counting = PairCounting::unordered;
};

// A scored single-subgroup (no w2) or bi-subgroup pattern. k_W and n_W are
// native counts (edges, vertex pairs); the information content counts every
// pair `multiplicity` times (2 for ordered counting on undirected graphs).
struct Pattern {
  Description w1;
  std::optional<Description> w2;
  Direction direction = Direction::dense;
  std::size_t size1 = 0;
  std::size_t size2 = 0;
  std::size_t k_w = 0;
  std::size_t n_w = 0;
  double p_w = 0;
  double ic = 0;
  double dl = 0;
  double si = 0;
  PairCounting counting = PairCounting::unordered;
  std::size_t multiplicity = 1;

  bool single() const { return !w2.has_value(); }
  double expected() const { return p_w * static_cast<double>(n_w); }
  // Number of selectors over both descriptions.
  std::size_t description_size() const { return w1.size() + (w2 ? w2->size() : 0); }
};

// s(s-1)/2 unordered, s(s-1) ordered. Throws for s < 2.
std::size_t n_w_single(std::size_t size, PairCounting counting);

// |A||B| - |A∩B|(|A∩B|+1)/2: unordered pairs between two vertex sets.
std::size_t n_w_bi(std::size_t size_a, std::size_t size_b, std::size_t overlap);

// Bernoulli KL divergence KL(q || p) in nats with 0 ln 0 = 0. p is clamped
// to [1e-12, 1 - 1e-12].
double kl_bernoulli(double q, double p);

// n_W * KL(k_W / n_W || p_W): lower bound on the pattern's information content.
double information_content(std::size_t n_w, std::size_t k_w, double p_w);

// alpha * (len1 + len2) + beta for bi-subgroup patterns, alpha * len1 + beta
// for single-subgroup patterns.
double description_length(std::size_t len1, std::optional<std::size_t> len2, const ScoreConstants& c);

Direction direction_of(std::size_t n_w, std::size_t k_w, double p_w);

// Fills in I, IC, DL and SI from the pattern's counts and multiplicity.
void finish_scores(Pattern& pattern, const ScoreConstants& c);

// Scores descriptions whose extensions are already known.
class PatternScorer {
 public:
  PatternScorer(const AttributedGraph& g, const BackgroundModel& model, ScoreConstants constants);

  const ScoreConstants& constants() const { return constants_; }

  // Nullopt when the pattern has no vertex pairs.
  std::optional<Pattern> score_single(const Description& w, const VertexSet& ext) const;
  std::optional<Pattern> score_bi(const Description& w1, const VertexSet& ext1, const Description& w2,
                                  const VertexSet& ext2) const;

 private:
  std::optional<Pattern> score(const Description& w1, const VertexSet& ext1, const Description* w2,
                               const VertexSet& ext2) const;

  const AttributedGraph& g_;
  const BackgroundModel& model_;
  ScoreConstants constants_;
};

// Evaluates a pattern from its descriptions alone; throws std::invalid_argument
// when it has no vertex pairs.
Pattern evaluate_pattern(const AttributedGraph& g, const BackgroundModel& model, const Description& w1,
                         const std::optional<Description>& w2, const ScoreConstants& c);

double subjective_interestingness(const AttributedGraph& g, const BackgroundModel& model, const Pattern& pattern,
                                  const ScoreConstants& c);

// Absorbs a pattern into the background model (native edge count of its block).
BackgroundModel absorb_pattern(const AttributedGraph& g, const BackgroundModel& model, const Pattern& pattern);

enum class TailSide { at_least, at_most };

// Exact Poisson-binomial tail P[X >= k] or P[X <= k] by dynamic programming.
// Limited to 25 trials.
double exact_tail_probability(std::span<const double> pair_probs, std::size_t k, TailSide side);

// Objective measures of a single subgroup.
enum class Measure {
  si,
  ic,
  dl,
  edge_density,
  avg_degree,
  pool,
  edge_surplus,
  segregation,
  modularity1,
  inv_avg_odf,
  inv_conductance,
};

std::string_view measure_name(Measure m);
std::optional<Measure> parse_measure(std::string_view name);

struct BaselineOptions {
  double edge_surplus_alpha = 1.0 / 3.0;
};

struct BaselineScores {
  double edge_density = 0;
  double avg_degree = 0;
  double pool = 0;
  double edge_surplus = 0;
  double segregation = 0;
  double modularity1 = 0;
  double inv_avg_odf = 0;
  double inv_conductance = 0;  // +inf when no edge leaves the subgroup

  // Value of a baseline measure; throws for si, ic and dl.
  double get(Measure m) const;
};

// Requires |a| >= 2.
BaselineScores baseline_scores(const AttributedGraph& g, const VertexSet& a, const BaselineOptions& options = {});

}  // namespace sigraph
