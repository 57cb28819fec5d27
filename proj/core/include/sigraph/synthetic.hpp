#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sigraph/graph.hpp"

namespace sigraph {

// Pairs with one end in {attr_a = value_a} and the other in {attr_b = value_b}
// get an edge with probability `density` instead of the background density.
// A side written "*" (empty attr) stands for every vertex.
struct PlantedBlock {
  std::string attr_a;
  std::string value_a;
  std::string attr_b;
  std::string value_b;
  double density = 0;
};

// Parses "attr=value:attr=value:density"; either side may be "*".
PlantedBlock parse_planted_block(std::string_view text);
std::string render_planted_block(const PlantedBlock& block);
// "attr=value", or "*" for an empty attribute.
std::string render_side(const std::string& attr, const std::string& value);

// Undirected graph with attributes
//   group   nominal, consecutive runs of group_size vertices ("0", "1", ...)
//   flagK   nominal "0"/"1", fair coin
//   score   numeric, uniform in [0, 100) with two decimals
//   tagK    nominal, a random pairing of the vertices (n/2 values of size 2)
struct SynthParams {
  std::size_t n = 400;
  double background_density = 0.02;
  std::size_t group_size = 50;
  std::size_t flags = 4;
  std::size_t tags = 0;
  bool score = true;
  std::vector<PlantedBlock> blocks;
  std::uint64_t seed = 1;
};

struct PlantedTruth {
  PlantedBlock block;
  std::vector<VertexId> side_a;
  std::vector<VertexId> side_b;
  std::size_t pairs = 0;  // unordered pairs owned by this block
  std::size_t edges = 0;  // edges generated on those pairs
};

struct SyntheticDataset {
  AttributedGraph graph;
  std::vector<PlantedTruth> truth;
};

// Deterministic per seed. Later blocks own pairs shared with earlier ones.
// Throws std::invalid_argument for densities outside [0, 1], an empty graph,
// or a block naming an unknown attribute value.
SyntheticDataset generate_synthetic(const SynthParams& params);

}  // namespace sigraph
