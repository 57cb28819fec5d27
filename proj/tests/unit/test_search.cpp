#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <unordered_set>

#include "fixtures.hpp"
#include "sigraph/search.hpp"

using namespace sigraph;
using namespace sigraph::testing;

namespace {

// Descriptions "x=<i>" over a throwaway attribute with many values.
struct Labels {
  AttributedGraph g;
  Labels() : g(make()) {}
  static AttributedGraph make() {
    std::vector<std::string> v, w;
    for (int i = 0; i < 20; ++i) {
      v.push_back(std::to_string(i));
      w.push_back(std::to_string(i % 10));
    }
    return AttributedGraph(20, {}, false, {nominal_column("p", v), nominal_column("q", w)});
  }
  Description p(int i) const { return parse_description("p=" + std::to_string(i), g); }
  Description q(int i) const { return parse_description("q=" + std::to_string(i), g); }
};

RankedPattern entry(const Description& w1, const Description& w2, double score) {
  RankedPattern r;
  r.pattern.w1 = w1;
  r.pattern.w2 = w2;
  r.score = score;
  return r;
}

std::vector<std::string> keys(const std::vector<RankedPattern>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(pattern_key(r.pattern));
  return out;
}

// All valid descriptions of length 1 and 2 over the selectors.
std::vector<Description> all_descriptions(std::span<const Selector> sel) {
  std::vector<Description> out;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    out.push_back(Description({sel[i]}));
    for (std::size_t j = i + 1; j < sel.size(); ++j) {
      if (sel[i].attribute() != sel[j].attribute()) out.push_back(Description({sel[i], sel[j]}));
    }
  }
  return out;
}

// A graph with a few attributes and few enough selectors to enumerate.
AttributedGraph tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 20 + rng() % 21;
  std::vector<Edge> edges;
  std::vector<std::string> a(n), b(n), c(n);
  for (VertexId u = 0; u < n; ++u) {
    a[u] = std::to_string(rng() % 3);
    b[u] = std::to_string(rng() % 3);
    c[u] = std::to_string(rng() % 2);
  }
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      const double p = a[u] == "0" && b[v] == "1" ? 0.5 : 0.08;
      if (std::uniform_real_distribution<double>(0, 1)(rng) < p) edges.emplace_back(u, v);
    }
  }
  return AttributedGraph(n, edges, false, {nominal_column("a", a), nominal_column("b", b), nominal_column("c", c)});
}

AttributedGraph planted_clique(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0, 1);
  const std::size_t n = 200;
  std::vector<std::string> club(n, "no"), colour(n), parity(n);
  for (VertexId v = 0; v < n; ++v) {
    colour[v] = std::to_string(rng() % 4);
    parity[v] = std::to_string(v % 2);
  }
  std::vector<VertexId> members;
  while (members.size() < 20) {
    const VertexId v = static_cast<VertexId>(rng() % n);
    if (club[v] == "no") {
      club[v] = "yes";
      members.push_back(v);
    }
  }
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if ((club[u] == "yes" && club[v] == "yes") || unit(rng) < 0.03) edges.emplace_back(u, v);
    }
  }
  return AttributedGraph(n, edges, false,
                         {nominal_column("club", club), nominal_column("colour", colour), nominal_column("parity", parity)});
}

}  // namespace

TEST(BeamTest, EmptyBeamAcceptsAnything) {
  Labels l;
  Beam b(2);
  EXPECT_TRUE(b.add_if_required(entry(l.p(0), l.q(0), -5)));
  EXPECT_EQ(b.size(), 1u);
  EXPECT_FALSE(b.add_if_required(entry(l.p(0), l.q(0), 100))) << "duplicate pattern";
  EXPECT_THROW(Beam(0), std::invalid_argument);
}

TEST(BeamTest, FullBeamRejectsWeakerCandidate) {
  Labels l;
  Beam b(2);
  b.add_if_required(entry(l.p(0), l.q(0), 3));
  b.add_if_required(entry(l.p(1), l.q(0), 2));
  const auto before = keys(b.ranked());
  EXPECT_FALSE(b.add_if_required(entry(l.p(2), l.q(0), 1)));
  EXPECT_EQ(keys(b.ranked()), before);
  EXPECT_TRUE(b.add_if_required(entry(l.p(3), l.q(0), 2.5)));
  EXPECT_EQ(keys(b.ranked()), (std::vector<std::string>{"p=0 | q=0", "p=3 | q=0"}));
}

TEST(BeamTest, TiesPreferShorterThenLexicographic) {
  Labels l;
  Beam b(1);
  b.add_if_required(entry(l.p(5), l.q(1), 1));
  EXPECT_TRUE(b.add_if_required(entry(l.p(1), l.q(1), 1)));
  EXPECT_EQ(pattern_key(b.ranked()[0].pattern), "p=1 | q=1");
  const Description longer({*l.p(0).selectors().begin(), *l.q(3).selectors().begin()});
  EXPECT_FALSE(b.add_if_required(entry(longer, l.q(1), 1)));
}

TEST(BeamTest, DiversityTraceKeepsDistinctCount) {
  // Capacity 3, two distinct W1 required; candidate joins the group of the
  // current minimum and beats it.
  Labels l;
  Beam b(3, 2);
  b.add_if_required(entry(l.p(0), l.q(1), 10));
  b.add_if_required(entry(l.p(0), l.q(2), 8));
  b.add_if_required(entry(l.p(1), l.q(3), 5));
  ASSERT_EQ(b.distinct_w1(), 2u);
  EXPECT_TRUE(b.add_if_required(entry(l.p(1), l.q(4), 6)));
  EXPECT_EQ(keys(b.ranked()), (std::vector<std::string>{"p=0 | q=1", "p=0 | q=2", "p=1 | q=4"}));
  EXPECT_EQ(b.distinct_w1(), 2u);
}

TEST(BeamTest, DiversityProtectsLastMemberOfAGroup) {
  Labels l;
  Beam b(3, 2);
  b.add_if_required(entry(l.p(0), l.q(1), 10));
  b.add_if_required(entry(l.p(0), l.q(2), 8));
  b.add_if_required(entry(l.p(1), l.q(3), 5));
  // A stronger p=0 pattern displaces p=0's own weakest entry, not p=1.
  EXPECT_TRUE(b.add_if_required(entry(l.p(0), l.q(4), 9)));
  EXPECT_EQ(keys(b.ranked()), (std::vector<std::string>{"p=0 | q=1", "p=0 | q=4", "p=1 | q=3"}));
  EXPECT_FALSE(b.add_if_required(entry(l.p(0), l.q(5), 8.5)));
  EXPECT_EQ(b.distinct_w1(), 2u);
}

TEST(BeamTest, NewW1EntersBelowFloor) {
  Labels l;
  Beam b(3, 3);
  b.add_if_required(entry(l.p(0), l.q(1), 10));
  b.add_if_required(entry(l.p(0), l.q(2), 9));
  b.add_if_required(entry(l.p(1), l.q(3), 8));
  EXPECT_TRUE(b.add_if_required(entry(l.p(2), l.q(4), 1)));
  EXPECT_EQ(b.distinct_w1(), 3u);
  EXPECT_EQ(keys(b.ranked()), (std::vector<std::string>{"p=0 | q=1", "p=1 | q=3", "p=2 | q=4"}));
}

TEST(BeamProperties, MinimumNeverDecreasesOnceFull) {
  Labels l;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    Beam b(1 + rng() % 6);
    std::optional<double> last;
    for (int i = 0; i < 200; ++i) {
      b.add_if_required(entry(l.p(rng() % 20), l.q(rng() % 10), static_cast<double>(rng() % 1000) / 10));
      if (!b.full()) continue;
      if (last) ASSERT_GE(*b.min_score(), *last);
      last = b.min_score();
    }
  }
}

TEST(BeamProperties, DiversityFloorHolds) {
  Labels l;
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t x1 = 1 + rng() % 5, x2 = 1 + rng() % 4;
    Beam b(x1 * x2, x1);
    std::unordered_set<int> seen;
    const int groups = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < 150; ++i) {
      const int w1 = static_cast<int>(rng() % groups);
      seen.insert(w1);
      b.add_if_required(entry(l.p(w1), l.q(rng() % 10), static_cast<double>(rng() % 1000)));
      ASSERT_GE(b.distinct_w1(), std::min(x1, seen.size()));
      ASSERT_LE(b.size(), x1 * x2);
    }
  }
}

TEST(SharedAttribute, Rule) {
  const auto g = random_graph(30, 0.1, 1);
  const auto d = [&](const char* s) { return parse_description(s, g); };
  EXPECT_TRUE(shares_attribute_with_different_value(d("x=0"), d("x=1")));
  EXPECT_FALSE(shares_attribute_with_different_value(d("x=0"), d("x=0")));
  EXPECT_FALSE(shares_attribute_with_different_value(d("x=0"), d("y=1")));
  EXPECT_TRUE(shares_attribute_with_different_value(d("x=0 \xE2\x88\xA7 y=1"), d("x=0 \xE2\x88\xA7 y=0")));
}

TEST(SingleSearch, WideBeamDepthOneIsExhaustive) {
  const auto g = tiny_instance(4);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g);
  SearchConfig cfg;
  cfg.beam_width = sel.size();
  cfg.depth = 1;
  const auto res = beam_search_single(g, model, sel, cfg);
  std::vector<double> want;
  for (const auto& s : sel) {
    if (selector_extension(s, g).size() >= 2) {
      want.push_back(evaluate_pattern(g, model, Description({s}), std::nullopt, cfg.constants).si);
    }
  }
  std::sort(want.rbegin(), want.rend());
  ASSERT_EQ(res.patterns.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(res.patterns[i].score, want[i], 1e-12);
  EXPECT_EQ(res.evaluated, sel.size());
}

TEST(SingleSearch, PlantedCliqueFound) {
  const auto g = planted_clique(3);
  const auto model = fit_degree_prior(g);
  SearchConfig cfg;
  cfg.beam_width = 10;
  cfg.depth = 1;
  const auto res = beam_search_single(g, model, generate_selectors(g), cfg);
  ASSERT_FALSE(res.patterns.empty());
  EXPECT_EQ(res.patterns[0].pattern.w1.render(), "club=yes");
  EXPECT_EQ(res.patterns[0].pattern.k_w, 190u);
}

TEST(SingleSearch, EmptyResultHasDiagnostic) {
  const AttributedGraph g(3, {{0, 1}}, false, {nominal_column("u", {"a", "b", "c"})});
  const auto model = fit_density_prior(g, 0.3);
  const auto res = beam_search_single(g, model, generate_selectors(g), SearchConfig{});
  EXPECT_TRUE(res.patterns.empty());
  EXPECT_FALSE(res.diagnostic.empty());
}

TEST(SingleSearch, ConfigValidation) {
  const auto g = tiny_instance(1);
  const auto model = fit_density_prior(g, 0.1);
  const auto sel = generate_selectors(g);
  SearchConfig cfg;
  cfg.depth = 0;
  EXPECT_THROW(beam_search_single(g, model, sel, cfg), std::invalid_argument);
  cfg = SearchConfig{};
  cfg.objective = Measure::dl;
  EXPECT_THROW(beam_search_single(g, model, sel, cfg), std::invalid_argument);
  EXPECT_THROW(beam_search_single(g, model, std::span<const Selector>{}, SearchConfig{}), std::invalid_argument);
}

TEST(SingleSearch, BaselineObjective) {
  const auto g = tiny_instance(8);
  const auto model = fit_density_prior(g, 0.1);
  SearchConfig cfg;
  cfg.objective = Measure::avg_degree;
  const auto res = beam_search_single(g, model, generate_selectors(g), cfg);
  ASSERT_FALSE(res.patterns.empty());
  const auto& top = res.patterns[0];
  EXPECT_NEAR(top.score, 2.0 * top.pattern.k_w / top.pattern.size1, 1e-12);
  for (std::size_t i = 1; i < res.patterns.size(); ++i) EXPECT_GE(res.patterns[i - 1].score, res.patterns[i].score);
}

TEST(SearchProperties, OracleEquivalence) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = tiny_instance(seed);
    const auto model = fit_degree_prior(g);
    const auto sel = generate_selectors(g);
    ASSERT_LE(sel.size(), 8u);
    const auto all = all_descriptions(sel);

    double best_single = -1, best_bi = -1;
    for (const auto& w1 : all) {
      const auto e1 = extension(w1, g);
      if (e1.empty()) continue;
      if (e1.size() >= 2) {
        best_single = std::max(best_single, evaluate_pattern(g, model, w1, std::nullopt, ScoreConstants{}).si);
      }
      for (const auto& w2 : all) {
        const auto e2 = extension(w2, g);
        if (e2.empty() || native_pair_count(e1.size(), e2.size(), e1.intersection_size(e2), false) == 0) continue;
        best_bi = std::max(best_bi, evaluate_pattern(g, model, w1, w2, ScoreConstants{}).si);
      }
    }

    SearchConfig cfg;
    cfg.beam_width = all.size();
    cfg.x1 = all.size();
    cfg.x2 = all.size();
    cfg.depth = 2;
    const auto single = beam_search_single(g, model, sel, cfg);
    const auto bi = nested_beam_search(g, model, sel, cfg);
    ASSERT_FALSE(single.patterns.empty());
    ASSERT_FALSE(bi.patterns.empty());
    EXPECT_NEAR(single.patterns[0].score, best_single, 1e-9) << "seed " << seed;
    EXPECT_NEAR(bi.patterns[0].score, best_bi, 1e-9) << "seed " << seed;
  }
}

TEST(SearchProperties, DeterministicAcrossRunsAndThreads) {
  const auto g = random_graph(120, 0.05, 44);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g, {3});
  SearchConfig cfg;
  cfg.x1 = 4;
  cfg.x2 = 3;
  const auto a = nested_beam_search(g, model, sel, cfg);
  cfg.threads = 4;
  const auto b = nested_beam_search(g, model, sel, cfg);
  ASSERT_EQ(keys(a.patterns), keys(b.patterns));
  for (std::size_t i = 0; i < a.patterns.size(); ++i) EXPECT_EQ(a.patterns[i].score, b.patterns[i].score);
  const auto s1 = beam_search_single(g, model, sel, cfg);
  cfg.threads = 1;
  const auto s2 = beam_search_single(g, model, sel, cfg);
  EXPECT_EQ(keys(s1.patterns), keys(s2.patterns));
}

TEST(NestedSearch, SizeCapAndDiversity) {
  const auto g = random_graph(100, 0.06, 5);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g, {3});
  SearchConfig cfg;
  cfg.x1 = 3;
  cfg.x2 = 2;
  const auto res = nested_beam_search(g, model, sel, cfg);
  EXPECT_LE(res.patterns.size(), 6u);
  std::unordered_set<std::string> w1;
  for (const auto& p : res.patterns) w1.insert(p.pattern.w1.render());
  EXPECT_GE(w1.size(), 3u);
  for (std::size_t i = 1; i < res.patterns.size(); ++i) EXPECT_TRUE(ranks_before(res.patterns[i - 1], res.patterns[i]));
}

TEST(NestedSearch, Constraints) {
  const auto g = random_graph(100, 0.06, 6);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g, {3});
  SearchConfig cfg;
  cfg.x1 = 3;
  cfg.x2 = 3;
  cfg.require_shared_attribute = true;
  cfg.require_disjoint_extensions = true;
  const auto res = nested_beam_search(g, model, sel, cfg);
  ASSERT_FALSE(res.patterns.empty());
  for (const auto& r : res.patterns) {
    EXPECT_TRUE(shares_attribute_with_different_value(r.pattern.w1, *r.pattern.w2));
    EXPECT_TRUE(extension(r.pattern.w1, g).disjoint(extension(*r.pattern.w2, g)));
  }
}

TEST(NestedSearch, ImpossibleConstraintsGiveDiagnostic) {
  const auto g = tiny_instance(2);
  const auto model = fit_degree_prior(g);
  std::vector<Selector> sel;
  for (const auto& s : generate_selectors(g)) {
    if (s.attribute_name() == "c") sel.push_back(s);
  }
  SearchConfig cfg;
  cfg.require_shared_attribute = true;
  cfg.depth = 1;
  sel.resize(1);
  const auto res = nested_beam_search(g, model, sel, cfg);
  EXPECT_TRUE(res.patterns.empty());
  EXPECT_FALSE(res.diagnostic.empty());
}

TEST(NestedSearch, ProgressAndCancellation) {
  const auto g = tiny_instance(3);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g);
  SearchConfig cfg;
  std::size_t calls = 0;
  cfg.progress = [&](const SearchProgress& p) {
    ++calls;
    EXPECT_LE(p.candidate, p.total);
    EXPECT_GE(p.round, 1);
  };
  nested_beam_search(g, model, sel, cfg);
  EXPECT_GT(calls, sel.size() - 1);
  cfg.cancelled = [] { return true; };
  const auto res = nested_beam_search(g, model, sel, cfg);
  EXPECT_TRUE(res.patterns.empty());
  EXPECT_NE(res.diagnostic.find("cancelled"), std::string::npos);
}

TEST(Iterate, AbsorbsTopPatterns) {
  const auto g = random_graph(80, 0.08, 10);
  const auto model = fit_degree_prior(g);
  const auto sel = generate_selectors(g, {3});
  SearchConfig cfg;
  cfg.x1 = 3;
  cfg.x2 = 2;
  const auto it = iterate(g, model, sel, cfg, 3, 2);
  ASSERT_EQ(it.rounds.size(), 3u);
  ASSERT_EQ(it.absorbed.size(), 6u);
  ASSERT_EQ(it.models.size(), 7u);
  EXPECT_EQ(it.models[0].updates().size(), 0u);
  EXPECT_EQ(it.models.back().updates().size(), 6u);
  EXPECT_EQ(pattern_key(it.absorbed[0]), pattern_key(it.rounds[0].patterns[0].pattern));
  EXPECT_LT(subjective_interestingness(g, it.models[1], it.absorbed[0], cfg.constants), 1e-6);
  // The absorbed top pattern is no longer the top pattern.
  EXPECT_NE(pattern_key(it.rounds[1].patterns[0].pattern), pattern_key(it.absorbed[0]));
  EXPECT_THROW(iterate(g, model, sel, cfg, 0), std::invalid_argument);
}
