#include "sigraph/search.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace sigraph {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

bool ranks_before_keyed(const RankedPattern& a, const std::string& ka, const RankedPattern& b,
                        const std::string& kb) {
  if (a.score != b.score) return a.score > b.score;
  const auto la = a.pattern.description_size();
  const auto lb = b.pattern.description_size();
  if (la != lb) return la < lb;
  return ka < kb;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto work = [&] {
    try {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Node {
  Description description;
  VertexSet ext;
};

struct Candidate {
  Description description;
  VertexSet ext;
};

// Refinements of every frontier node by every selector, skipping ones seen
// before, too small, or with the parent's extension.
std::vector<Candidate> expand(const std::vector<Node>& frontier, std::span<const Selector> selectors,
                              const std::vector<VertexSet>& selector_ext, std::size_t min_size,
                              std::unordered_set<std::string>& seen) {
  std::vector<Candidate> out;
  for (const auto& node : frontier) {
    for (std::size_t i = 0; i < selectors.size(); ++i) {
      auto refined = refine(node.description, selectors[i]);
      if (!refined) continue;
      auto key = refined->render();
      if (seen.count(key)) continue;
      auto ext = node.ext.intersect(selector_ext[i]);
      if (ext.size() < min_size || ext == node.ext) continue;
      seen.insert(std::move(key));
      out.push_back({std::move(*refined), std::move(ext)});
    }
  }
  return out;
}

const VertexSet& ext_of(const std::vector<Candidate>& candidates, const Description& d) {
  for (const auto& c : candidates) {
    if (c.description == d) return c.ext;
  }
  throw std::logic_error("beam entry without a generating candidate");
}

bool is_cancelled(const SearchConfig& cfg) { return cfg.cancelled && cfg.cancelled(); }

std::vector<VertexSet> selector_extensions(const AttributedGraph& g, std::span<const Selector> selectors) {
  std::vector<VertexSet> out;
  out.reserve(selectors.size());
  for (const auto& s : selectors) out.push_back(selector_extension(s, g));
  return out;
}

}  // namespace

void SearchConfig::validate() const {
  if (beam_width < 1 || x1 < 1 || x2 < 1) throw std::invalid_argument("beam widths must be at least 1");
  if (depth < 1) throw std::invalid_argument("search depth must be at least 1");
  if (objective == Measure::dl) throw std::invalid_argument("description length is not a search objective");
}

std::string pattern_key(const Pattern& p) {
  std::string key = p.w1.render();
  if (p.w2) key += " | " + p.w2->render();
  return key;
}

bool ranks_before(const RankedPattern& a, const RankedPattern& b) {
  return ranks_before_keyed(a, pattern_key(a.pattern), b, pattern_key(b.pattern));
}

// ---------------------------------------------------------------------------

Beam::Beam(std::size_t capacity, std::size_t diversity_floor) : capacity_(capacity), floor_(diversity_floor) {
  if (capacity == 0) throw std::invalid_argument("beam capacity must be positive");
}

std::vector<RankedPattern> Beam::ranked() const {
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before_keyed(entries_[a], keys_[a], entries_[b], keys_[b]);
  });
  std::vector<RankedPattern> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(entries_[i]);
  return out;
}

std::size_t Beam::distinct_w1() const {
  std::unordered_set<std::string> groups;
  for (const auto& e : entries_) groups.insert(e.pattern.w1.render());
  return groups.size();
}

std::optional<double> Beam::min_score() const {
  if (entries_.empty()) return std::nullopt;
  double m = entries_.front().score;
  for (const auto& e : entries_) m = std::min(m, e.score);
  return m;
}

std::size_t Beam::group_size(const Description& w1) const {
  std::size_t count = 0;
  for (const auto& e : entries_) count += e.pattern.w1 == w1 ? 1 : 0;
  return count;
}

std::size_t Beam::worst_index(bool over_represented_only) const {
  std::size_t worst = npos;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (over_represented_only && group_size(entries_[i].pattern.w1) < 2) continue;
    if (worst == npos || ranks_before_keyed(entries_[worst], keys_[worst], entries_[i], keys_[i])) worst = i;
  }
  return worst;
}

bool Beam::add_if_required(RankedPattern candidate) {
  auto key = pattern_key(candidate.pattern);
  if (std::find(keys_.begin(), keys_.end(), key) != keys_.end()) return false;
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(candidate));
    keys_.push_back(std::move(key));
    return true;
  }

  std::size_t target = worst_index(false);
  if (floor_ > 1) {
    const bool new_group = group_size(candidate.pattern.w1) == 0;
    const std::size_t distinct = distinct_w1();
    if (new_group && distinct < floor_) {
      // Below the floor a new W1 always gets in, at the expense of the
      // weakest entry of a group that can spare one.
      const std::size_t spare = worst_index(true);
      if (spare != npos) {
        entries_[spare] = std::move(candidate);
        keys_[spare] = std::move(key);
        return true;
      }
    } else if (!new_group && !(entries_[target].pattern.w1 == candidate.pattern.w1) &&
               group_size(entries_[target].pattern.w1) == 1 && distinct - 1 < floor_) {
      target = worst_index(true);
      if (target == npos) return false;
    }
  }
  if (!ranks_before_keyed(candidate, key, entries_[target], keys_[target])) return false;
  entries_[target] = std::move(candidate);
  keys_[target] = std::move(key);
  return true;
}

// ---------------------------------------------------------------------------

bool shares_attribute_with_different_value(const Description& w1, const Description& w2) {
  for (const auto& s : w1.selectors()) {
    const Selector* other = w2.selector_for(s.attribute());
    if (other && !(*other == s)) return true;
  }
  return false;
}

SearchResult beam_search_single(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg) {
  cfg.validate();
  if (selectors.empty()) throw std::invalid_argument("no selectors to search over");
  const PatternScorer scorer(g, model, cfg.constants);
  const auto selector_ext = selector_extensions(g, selectors);
  const std::size_t threads = resolve_threads(cfg.threads);
  const std::size_t min_size = std::max<std::size_t>(2, cfg.min_extension_size);

  SearchResult result;
  Beam beam(cfg.beam_width);
  std::vector<Node> frontier{{Description(), VertexSet::full(g.vertex_count())}};
  std::unordered_set<std::string> seen;

  for (int round = 1; round <= cfg.depth && !frontier.empty(); ++round) {
    if (is_cancelled(cfg)) {
      result.diagnostic = "cancelled before round " + std::to_string(round);
      break;
    }
    if (cfg.progress) {
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        cfg.progress({round, i + 1, frontier.size(), frontier[i].description.render()});
      }
    }
    const auto candidates = expand(frontier, selectors, selector_ext, min_size, seen);
    std::vector<std::optional<RankedPattern>> scored(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
      auto p = scorer.score_single(candidates[i].description, candidates[i].ext);
      if (!p) return;
      double score = p->si;
      if (cfg.objective == Measure::ic) {
        score = p->ic;
      } else if (cfg.objective != Measure::si) {
        score = baseline_scores(g, candidates[i].ext, cfg.baseline).get(cfg.objective);
      }
      scored[i] = RankedPattern{std::move(*p), score};
    });
    result.evaluated += candidates.size();
    for (auto& s : scored) {
      if (s) beam.add_if_required(std::move(*s));
    }

    frontier.clear();
    for (const auto& e : beam.ranked()) {
      if (e.pattern.w1.size() != static_cast<std::size_t>(round)) continue;
      frontier.push_back({e.pattern.w1, ext_of(candidates, e.pattern.w1)});
    }
  }

  result.patterns = beam.ranked();
  if (result.patterns.empty() && result.diagnostic.empty()) {
    result.diagnostic = "no description has an extension of at least " + std::to_string(min_size) + " vertices";
  }
  return result;
}

namespace {

std::vector<RankedPattern> inner_search(const PatternScorer& scorer, const Description& z1, const VertexSet& ext1,
                                        std::span<const Selector> selectors,
                                        const std::vector<VertexSet>& selector_ext, const SearchConfig& cfg,
                                        std::size_t threads, std::size_t& evaluated) {
  Beam inner(cfg.x2);
  std::vector<Node> frontier{{Description(), VertexSet::full(ext1.universe())}};
  std::unordered_set<std::string> seen;
  const std::size_t min_size = std::max<std::size_t>(1, cfg.min_extension_size);

  for (int round = 1; round <= cfg.depth && !frontier.empty(); ++round) {
    auto candidates = expand(frontier, selectors, selector_ext, min_size, seen);
    std::erase_if(candidates, [&](const Candidate& c) {
      if (cfg.require_disjoint_extensions && !ext1.disjoint(c.ext)) return true;
      if (cfg.require_shared_attribute && !shares_attribute_with_different_value(z1, c.description)) return true;
      return false;
    });
    std::vector<std::optional<Pattern>> scored(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
      scored[i] = scorer.score_bi(z1, ext1, candidates[i].description, candidates[i].ext);
    });
    evaluated += candidates.size();
    for (auto& p : scored) {
      if (!p) continue;
      const double si = p->si;
      inner.add_if_required({std::move(*p), si});
    }

    frontier.clear();
    for (const auto& e : inner.ranked()) {
      if (e.pattern.w2->size() != static_cast<std::size_t>(round)) continue;
      frontier.push_back({*e.pattern.w2, ext_of(candidates, *e.pattern.w2)});
    }
  }
  return inner.ranked();
}

}  // namespace

SearchResult nested_beam_search(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg) {
  cfg.validate();
  if (selectors.empty()) throw std::invalid_argument("no selectors to search over");
  const PatternScorer scorer(g, model, cfg.constants);
  const auto selector_ext = selector_extensions(g, selectors);
  const std::size_t threads = resolve_threads(cfg.threads);
  const std::size_t min_size = std::max<std::size_t>(1, cfg.min_extension_size);

  SearchResult result;
  Beam outer(cfg.x1 * cfg.x2, cfg.x1);
  std::vector<Node> frontier{{Description(), VertexSet::full(g.vertex_count())}};
  std::unordered_set<std::string> processed;

  for (int round = 1; round <= cfg.depth && !frontier.empty(); ++round) {
    if (is_cancelled(cfg)) {
      result.diagnostic = "cancelled before round " + std::to_string(round);
      break;
    }
    const auto outer_candidates = expand(frontier, selectors, selector_ext, min_size, processed);
    for (std::size_t i = 0; i < outer_candidates.size(); ++i) {
      const auto& z1 = outer_candidates[i];
      if (cfg.progress) cfg.progress({round, i + 1, outer_candidates.size(), z1.description.render()});
      auto survivors =
          inner_search(scorer, z1.description, z1.ext, selectors, selector_ext, cfg, threads, result.evaluated);
      for (auto& s : survivors) outer.add_if_required(std::move(s));
    }

    frontier.clear();
    std::unordered_set<std::string> queued;
    for (const auto& e : outer.ranked()) {
      if (e.pattern.w1.size() != static_cast<std::size_t>(round)) continue;
      if (!queued.insert(e.pattern.w1.render()).second) continue;
      frontier.push_back({e.pattern.w1, ext_of(outer_candidates, e.pattern.w1)});
    }
  }

  result.patterns = outer.ranked();
  if (result.patterns.size() > cfg.x1 * cfg.x2) result.patterns.resize(cfg.x1 * cfg.x2);
  if (result.patterns.empty() && result.diagnostic.empty()) {
    result.diagnostic = "no description pair satisfies the search constraints";
  }
  return result;
}

IterationResult iterate(const AttributedGraph& g, const BackgroundModel& model0, std::span<const Selector> selectors,
                        const SearchConfig& cfg, int rounds, std::size_t absorb) {
  if (rounds < 1) throw std::invalid_argument("iterate needs at least one round");
  if (absorb < 1) throw std::invalid_argument("iterate must absorb at least one pattern per round");
  IterationResult out;
  out.models.push_back(model0);
  for (int t = 1; t <= rounds; ++t) {
    if (is_cancelled(cfg)) {
      out.diagnostic = "cancelled before iteration " + std::to_string(t);
      break;
    }
    auto res = nested_beam_search(g, out.models.back(), selectors, cfg);
    const bool empty = res.patterns.empty();
    const std::size_t take = std::min(absorb, res.patterns.size());
    for (std::size_t i = 0; i < take; ++i) {
      const auto& p = res.patterns[i].pattern;
      out.models.push_back(absorb_pattern(g, out.models.back(), p));
      out.absorbed.push_back(p);
    }
    out.rounds.push_back(std::move(res));
    if (empty) {
      out.diagnostic = "iteration " + std::to_string(t) + " found no pattern";
      break;
    }
  }
  return out;
}

}  // namespace sigraph
