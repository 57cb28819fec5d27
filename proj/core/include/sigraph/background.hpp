#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigraph/graph.hpp"
#include "sigraph/vertex_set.hpp"

namespace sigraph {

// The fit did not reach its tolerance within the iteration budget.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PriorKind { density, degree, blocks };

// How an undirected vertex pair is counted when forming n_W. Ordered counting
// counts every unordered pair in both orientations (and its edge twice).
// Directed graphs always count ordered pairs once.
enum class PairCounting { ordered, unordered };

const char* to_string(PriorKind kind);
const char* to_string(PairCounting counting);

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kMultiplierBound = 30.0;

struct FitOptions {
  double tol = 1e-4;
  int max_iter = 500;
};

struct FitDiagnostics {
  int iterations = 0;
  double max_degree_residual = 0;  // per vertex, in expected-edge units
  double max_block_residual = 0;   // per block, in expected-edge units
  std::vector<std::string> warnings;
};

// A block of vertex pairs: for undirected graphs the unordered pairs {u,v},
// u != v, with one end in `a` and the other in `b`; for directed graphs the
// ordered pairs (u,v), u != v, with u in `a` and v in `b`.
struct PairBlock {
  VertexSet a;
  VertexSet b;
};

// Number of pairs in the block under the graph's native counting.
std::size_t native_pair_count(std::size_t size_a, std::size_t size_b, std::size_t overlap, bool directed);

// One absorbed pattern: pairs in the block get `lambda` added to their log-odds.
struct PatternUpdate {
  PairBlock block;
  double lambda = 0;
  std::size_t observed = 0;  // native edge count the update was calibrated to
  std::string label;
};

// Product-of-Bernoulli edge distribution. The log-odds of a pair is
//   offset + lambda_row[u] + lambda_col[v] + gamma[cell u][cell v] + sum of
//   the lambdas of every absorbed pattern whose block contains the pair,
// and probabilities are clamped to [1e-12, 1 - 1e-12] when read.
class BackgroundModel {
 public:
  struct Parameters {
    PriorKind prior = PriorKind::density;
    bool directed = false;
    std::size_t vertex_count = 0;
    double offset = 0;
    std::vector<double> lambda_row;  // empty means all zero
    std::vector<double> lambda_col;  // empty means all zero; equals lambda_row when undirected
    std::vector<std::string> partitions;
    std::size_t cell_count = 1;
    std::vector<std::uint32_t> cell_of;  // empty means every vertex in cell 0
    std::vector<double> gamma;           // cell_count * cell_count, row major
  };

  explicit BackgroundModel(Parameters params, FitDiagnostics diagnostics = {});

  PriorKind prior() const { return params_.prior; }
  bool directed() const { return params_.directed; }
  std::size_t vertex_count() const { return params_.vertex_count; }
  const Parameters& parameters() const { return params_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }
  std::span<const PatternUpdate> updates() const { return updates_; }

  double edge_probability(VertexId u, VertexId v) const;
  // Unclamped log-odds of the pair.
  double log_odds(VertexId u, VertexId v) const;

  // Sum of clamped probabilities over the native pairs of the block, with
  // `shift` added to every log-odds (shift = 0 gives the model's own sum).
  double expected_count(const PairBlock& block, double shift = 0) const;

  // Returns a new model with one more absorbed pattern. `lambda` is the root of
  // expected_count(block, lambda) = observed, found by bracketed bisection.
  BackgroundModel with_update(PairBlock block, std::size_t observed, std::string label = {}) const;

  std::string serialize() const;
  static BackgroundModel deserialize(std::string_view text);

  // Number of distinct vertex classes the probability index uses.
  std::size_t class_count() const;

  struct Index;
  struct WeightedLogOdds;

 private:
  void rebuild_index();
  double base_log_odds(VertexId u, VertexId v) const;
  // log_odds without argument checks; (u, u) yields the value shared by two
  // distinct vertices of u's class.
  double raw_log_odds(VertexId u, VertexId v) const;
  std::vector<WeightedLogOdds> block_weights(const PairBlock& block) const;

  Parameters params_;
  FitDiagnostics diagnostics_;
  std::vector<PatternUpdate> updates_;
  std::shared_ptr<const Index> index_;
};

BackgroundModel fit_density_prior(const AttributedGraph& g, double density);

// Degree constraints: expected degree of every vertex equals its observed
// degree (out and in degrees separately for directed graphs).
BackgroundModel fit_degree_prior(const AttributedGraph& g, const FitOptions& options = {});

// Block constraints over the intersection of the bins of the listed nominal
// attributes, optionally fitted jointly with the degree constraints.
BackgroundModel fit_block_prior(const AttributedGraph& g, std::span<const std::string> partitions, bool with_degrees,
                                const FitOptions& options = {});

struct BlockMean {
  double p_w = 0;
  std::size_t n_w = 0;
};

// Mean pair probability over the pairs counted by n_W for blocks (a, b).
// Throws std::invalid_argument when n_W = 0.
BlockMean block_mean_probability(const BackgroundModel& model, const VertexSet& a, const VertexSet& b,
                                 PairCounting counting);

// I-projection onto "the block holds exactly `observed` edges" (native count).
BackgroundModel update_with_pattern(const BackgroundModel& model, const VertexSet& a, const VertexSet& b,
                                    std::size_t observed, std::string label = {});

}  // namespace sigraph
