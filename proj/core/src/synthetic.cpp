#include "sigraph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

#include "sigraph/text.hpp"

namespace sigraph {

namespace {

std::pair<std::string, std::string> split_assignment(std::string_view text) {
  text = trim(text);
  if (text == "*") return {};
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("expected attr=value, got '" + std::string(text) + "'");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

void check_density(double p, const std::string& what) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument(what + " must lie in [0, 1]");
}

std::vector<VertexId> members_with(const AttributedGraph& g, const std::string& attr, const std::string& value) {
  if (attr.empty()) {
    std::vector<VertexId> all(g.vertex_count());
    std::iota(all.begin(), all.end(), VertexId{0});
    return all;
  }
  const auto index = g.find_attribute(attr);
  if (!index) throw std::invalid_argument("planted block names unknown attribute '" + attr + "'");
  const auto& col = g.attribute(*index);
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (col.value_text(v) == value) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no vertex has " + attr + "=" + value);
  return out;
}

}  // namespace

PlantedBlock parse_planted_block(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("planted block must be attr=value:attr=value:density");
  PlantedBlock b;
  std::tie(b.attr_a, b.value_a) = split_assignment(parts[0]);
  std::tie(b.attr_b, b.value_b) = split_assignment(parts[1]);
  const auto density = parse_number(trim(parts[2]));
  if (!density) throw std::invalid_argument("bad block density '" + std::string(parts[2]) + "'");
  b.density = *density;
  check_density(b.density, "block density");
  return b;
}

std::string render_side(const std::string& attr, const std::string& value) {
  return attr.empty() ? "*" : attr + "=" + value;
}

std::string render_planted_block(const PlantedBlock& b) {
  return render_side(b.attr_a, b.value_a) + ":" + render_side(b.attr_b, b.value_b) + ":" + format_number(b.density);
}

SyntheticDataset generate_synthetic(const SynthParams& params) {
  if (params.n < 2) throw std::invalid_argument("synthetic graph needs at least two vertices");
  if (params.group_size == 0) throw std::invalid_argument("group size must be positive");
  check_density(params.background_density, "background density");
  for (const auto& b : params.blocks) check_density(b.density, "block density");

  const std::size_t n = params.n;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<AttributeColumn> columns;
  {
    std::vector<std::optional<std::string>> values(n);
    for (std::size_t v = 0; v < n; ++v) values[v] = std::to_string(v / params.group_size);
    columns.push_back(AttributeColumn::nominal("group", values));
  }
  for (std::size_t f = 0; f < params.flags; ++f) {
    std::vector<std::optional<std::string>> values(n);
    for (auto& x : values) x = unit(rng) < 0.5 ? "0" : "1";
    columns.push_back(AttributeColumn::nominal("flag" + std::to_string(f), values));
  }
  if (params.score) {
    std::vector<double> values(n);
    for (auto& x : values) x = std::floor(unit(rng) * 10000.0) / 100.0;
    columns.push_back(AttributeColumn::numeric("score", values));
  }
  for (std::size_t t = 0; t < params.tags; ++t) {
    std::vector<VertexId> perm(n);
    std::iota(perm.begin(), perm.end(), VertexId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::optional<std::string>> values(n);
    for (std::size_t i = 0; i < n; ++i) values[perm[i]] = "p" + std::to_string(i / 2);
    columns.push_back(AttributeColumn::nominal("tag" + std::to_string(t), values));
  }

  // Attribute-only graph to resolve the block sides.
  const AttributedGraph shell(n, {}, false, columns);
  std::vector<PlantedTruth> truth;
  std::vector<std::pair<VertexSet, VertexSet>> sides;
  for (const auto& b : params.blocks) {
    PlantedTruth t{b, members_with(shell, b.attr_a, b.value_a), members_with(shell, b.attr_b, b.value_b), 0, 0};
    sides.emplace_back(VertexSet::from_members(n, t.side_a), VertexSet::from_members(n, t.side_b));
    truth.push_back(std::move(t));
  }
  // Index of the last block containing the pair, or npos.
  const auto owner_of = [&](VertexId u, VertexId v) {
    for (std::size_t i = sides.size(); i-- > 0;) {
      const auto& [a, b] = sides[i];
      if ((a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u))) return i;
    }
    return std::string::npos;
  };

  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      const std::size_t o = owner_of(u, v);
      const double p = o == std::string::npos ? params.background_density : params.blocks[o].density;
      const bool edge = unit(rng) < p;
      if (o != std::string::npos) {
        truth[o].pairs += 1;
        truth[o].edges += edge ? 1 : 0;
      }
      if (edge) edges.emplace_back(u, v);
    }
  }
  return {AttributedGraph(n, std::move(edges), false, std::move(columns)), std::move(truth)};
}

}  // namespace sigraph
