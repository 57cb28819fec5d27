#include "sigraph/interestingness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sigraph {

std::size_t n_w_single(std::size_t size, PairCounting counting) {
  if (size < 2) throw std::invalid_argument("a single subgroup needs at least two vertices");
  const std::size_t ordered = size * (size - 1);
  return counting == PairCounting::ordered ? ordered : ordered / 2;
}

std::size_t n_w_bi(std::size_t size_a, std::size_t size_b, std::size_t overlap) {
  if (overlap > std::min(size_a, size_b)) throw std::invalid_argument("overlap larger than a subgroup");
  const std::size_t all = size_a * size_b;
  const std::size_t twice = overlap * (overlap + 1) / 2;
  if (twice > all) throw std::logic_error("negative pair count");
  return all - twice;
}

double kl_bernoulli(double q, double p) {
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("kl_bernoulli: q outside [0,1]");
  p = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
  double kl = 0;
  if (q > 0) kl += q * std::log(q / p);
  if (q < 1) kl += (1 - q) * std::log((1 - q) / (1 - p));
  return std::max(0.0, kl);
}

double information_content(std::size_t n_w, std::size_t k_w, double p_w) {
  if (n_w == 0) throw std::invalid_argument("information content of a pattern without pairs");
  if (k_w > n_w) throw std::invalid_argument("k_W exceeds n_W");
  const double n = static_cast<double>(n_w);
  return n * kl_bernoulli(static_cast<double>(k_w) / n, p_w);
}

double description_length(std::size_t len1, std::optional<std::size_t> len2, const ScoreConstants& c) {
  const double selectors = static_cast<double>(len1 + len2.value_or(0));
  return c.alpha * selectors + c.beta;
}

Direction direction_of(std::size_t n_w, std::size_t k_w, double p_w) {
  return static_cast<double>(k_w) / static_cast<double>(n_w) >= p_w ? Direction::dense : Direction::sparse;
}

void finish_scores(Pattern& pattern, const ScoreConstants& c) {
  pattern.direction = direction_of(pattern.n_w, pattern.k_w, pattern.p_w);
  const std::size_t m = pattern.multiplicity;
  pattern.ic = information_content(m * pattern.n_w, m * pattern.k_w, pattern.p_w);
  pattern.dl = description_length(pattern.w1.size(),
                                  pattern.w2 ? std::optional<std::size_t>(pattern.w2->size()) : std::nullopt, c);
  pattern.si = pattern.ic / pattern.dl;
}

// ---------------------------------------------------------------------------

PatternScorer::PatternScorer(const AttributedGraph& g, const BackgroundModel& model, ScoreConstants constants)
    : g_(g), model_(model), constants_(constants) {
  if (model.vertex_count() != g.vertex_count() || model.directed() != g.directed()) {
    throw std::invalid_argument("background model does not belong to this graph");
  }
  if (!(constants_.alpha > 0 && constants_.beta > 0)) throw std::invalid_argument("alpha and beta must be positive");
}

std::optional<Pattern> PatternScorer::score_single(const Description& w, const VertexSet& ext) const {
  return score(w, ext, nullptr, ext);
}

std::optional<Pattern> PatternScorer::score_bi(const Description& w1, const VertexSet& ext1, const Description& w2,
                                               const VertexSet& ext2) const {
  return score(w1, ext1, &w2, ext2);
}

std::optional<Pattern> PatternScorer::score(const Description& w1, const VertexSet& ext1, const Description* w2,
                                            const VertexSet& ext2) const {
  const std::size_t overlap = w2 ? ext1.intersection_size(ext2) : ext1.size();
  const std::size_t native = native_pair_count(ext1.size(), ext2.size(), overlap, g_.directed());
  if (native == 0) return std::nullopt;
  const PairCounting counting = w2 ? constants_.bi_counting : constants_.single_counting;
  const std::size_t factor = (!g_.directed() && counting == PairCounting::ordered) ? 2 : 1;

  Pattern p;
  p.w1 = w1;
  if (w2) p.w2 = *w2;
  p.size1 = ext1.size();
  p.size2 = ext2.size();
  p.k_w = count_edges_between(g_, ext1, ext2);
  p.n_w = native;
  p.multiplicity = factor;
  p.p_w = model_.expected_count({ext1, ext2}) / static_cast<double>(native);
  p.counting = g_.directed() ? PairCounting::ordered : counting;
  finish_scores(p, constants_);
  return p;
}

Pattern evaluate_pattern(const AttributedGraph& g, const BackgroundModel& model, const Description& w1,
                         const std::optional<Description>& w2, const ScoreConstants& c) {
  PatternScorer scorer(g, model, c);
  const auto ext1 = extension(w1, g);
  std::optional<Pattern> p;
  if (w2) {
    p = scorer.score_bi(w1, ext1, *w2, extension(*w2, g));
  } else {
    p = scorer.score_single(w1, ext1);
  }
  if (!p) throw std::invalid_argument("pattern has no vertex pairs");
  return *p;
}

double subjective_interestingness(const AttributedGraph& g, const BackgroundModel& model, const Pattern& pattern,
                                  const ScoreConstants& c) {
  return evaluate_pattern(g, model, pattern.w1, pattern.w2, c).si;
}

BackgroundModel absorb_pattern(const AttributedGraph& g, const BackgroundModel& model, const Pattern& pattern) {
  const auto a = extension(pattern.w1, g);
  const auto b = pattern.w2 ? extension(*pattern.w2, g) : a;
  std::string label = pattern.w1.render();
  if (pattern.w2) label += " | " + pattern.w2->render();
  return model.with_update({a, b}, count_edges_between(g, a, b), std::move(label));
}

// ---------------------------------------------------------------------------

double exact_tail_probability(std::span<const double> pair_probs, std::size_t k, TailSide side) {
  if (pair_probs.size() > 25) throw std::invalid_argument("exact tail oracle is limited to 25 trials");
  // dist[j] = P[X = j] after processing a prefix of the trials.
  std::vector<double> dist(pair_probs.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < pair_probs.size(); ++i) {
    const double p = pair_probs[i];
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("probability outside [0,1]");
    for (std::size_t j = i + 1; j > 0; --j) dist[j] = dist[j] * (1 - p) + dist[j - 1] * p;
    dist[0] *= (1 - p);
  }
  double tail = 0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (side == TailSide::at_least ? j >= k : j <= k) tail += dist[j];
  }
  return std::min(1.0, tail);
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::pair<Measure, std::string_view>, 11> kMeasureNames{{
    {Measure::si, "si"},
    {Measure::ic, "ic"},
    {Measure::dl, "dl"},
    {Measure::edge_density, "edge_density"},
    {Measure::avg_degree, "avg_degree"},
    {Measure::pool, "pool"},
    {Measure::edge_surplus, "edge_surplus"},
    {Measure::segregation, "segregation"},
    {Measure::modularity1, "modularity1"},
    {Measure::inv_avg_odf, "inv_avg_odf"},
    {Measure::inv_conductance, "inv_conductance"},
}};
}  // namespace

std::string_view measure_name(Measure m) {
  for (const auto& [measure, name] : kMeasureNames) {
    if (measure == m) return name;
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (const auto& [measure, n] : kMeasureNames) {
    if (n == name) return measure;
  }
  return std::nullopt;
}

double BaselineScores::get(Measure m) const {
  switch (m) {
    case Measure::edge_density:
      return edge_density;
    case Measure::avg_degree:
      return avg_degree;
    case Measure::pool:
      return pool;
    case Measure::edge_surplus:
      return edge_surplus;
    case Measure::segregation:
      return segregation;
    case Measure::modularity1:
      return modularity1;
    case Measure::inv_avg_odf:
      return inv_avg_odf;
    case Measure::inv_conductance:
      return inv_conductance;
    default:
      throw std::invalid_argument("not a baseline measure: " + std::string(measure_name(m)));
  }
}

BaselineScores baseline_scores(const AttributedGraph& g, const VertexSet& a, const BaselineOptions& options) {
  if (a.size() < 2) throw std::invalid_argument("baseline measures need at least two vertices");
  const double s = static_cast<double>(a.size());
  const double n = static_cast<double>(g.vertex_count());
  const double m = static_cast<double>(g.edge_count());
  const double k = static_cast<double>(count_edges_between(g, a, a));
  const double inter = static_cast<double>(inter_edge_count(g, a));
  const double pairs = s * (s - 1);

  double degree_sum = 0;
  double odf_sum = 0;
  for (VertexId u : a.members()) {
    const double d = static_cast<double>(g.degree(u));
    degree_sum += d;
    if (d == 0) continue;
    double outside = 0;
    for (VertexId v : g.out_neighbors(u)) outside += a.contains(v) ? 0 : 1;
    if (g.directed()) {
      for (VertexId v : g.in_neighbors(u)) outside += a.contains(v) ? 0 : 1;
    }
    odf_sum += outside / d;
  }

  BaselineScores out;
  out.edge_density = 2 * k / pairs;
  out.avg_degree = 2 * k / s;
  out.pool = -pairs / 2 + 3 * k;
  out.edge_surplus = k - options.edge_surplus_alpha * pairs;
  const double seg_denominator = 2 * m * s * (n - s);
  out.segregation = seg_denominator == 0 ? 1.0 : 1.0 - inter * n * (n - 1) / seg_denominator;
  out.modularity1 = m == 0 ? 0.0 : (2 * k - degree_sum * degree_sum / (2 * m)) / (2 * m);
  out.inv_avg_odf = 1.0 - odf_sum / s;
  out.inv_conductance = inter == 0 ? std::numeric_limits<double>::infinity() : k / inter;
  return out;
}

}  // namespace sigraph
