#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sigraph/vertex_set.hpp"

namespace sigraph {

// Malformed or inconsistent input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttributeKind { nominal, numeric };

// One typed vertex attribute. Nominal values are stored as codes into a
// sorted domain, -1 marks a missing value. Numeric values use NaN for missing.
struct AttributeColumn {
  std::string name;
  AttributeKind kind = AttributeKind::nominal;
  std::vector<std::string> domain;  // nominal only, sorted
  std::vector<int> codes;           // nominal only
  std::vector<double> numbers;      // numeric only

  static constexpr int missing_code = -1;

  static AttributeColumn nominal(std::string name, std::span<const std::optional<std::string>> values);
  static AttributeColumn numeric(std::string name, std::span<const double> values);

  std::size_t size() const { return kind == AttributeKind::nominal ? codes.size() : numbers.size(); }
  bool is_missing(VertexId v) const;
  // Rendering of the value of `v` as it would appear in an attribute file.
  std::string value_text(VertexId v) const;
  // Code of `symbol` in the domain, or nullopt.
  std::optional<int> code_of(std::string_view symbol) const;
};

using Edge = std::pair<VertexId, VertexId>;

class AttributedGraph {
 public:
  AttributedGraph(std::size_t vertex_count, std::vector<Edge> edges, bool directed,
                  std::vector<AttributeColumn> attributes, std::vector<std::string> labels = {},
                  bool allow_self_loops = false);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }

  // Edges in canonical order. Undirected edges are stored with first < second.
  std::span<const Edge> edges() const { return edges_; }

  // Total degree. For directed graphs this is out + in.
  std::size_t degree(VertexId u) const;
  std::size_t out_degree(VertexId u) const;
  std::size_t in_degree(VertexId u) const;

  // Sorted neighbours. For undirected graphs out and in neighbours coincide.
  std::span<const VertexId> out_neighbors(VertexId u) const;
  std::span<const VertexId> in_neighbors(VertexId u) const;

  bool has_edge(VertexId u, VertexId v) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(VertexId u) const { return labels_.at(u); }

  std::span<const AttributeColumn> attributes() const { return attributes_; }
  const AttributeColumn& attribute(std::size_t index) const { return attributes_.at(index); }
  std::optional<std::size_t> find_attribute(std::string_view name) const;

 private:
  void check_vertex(VertexId u) const;

  std::size_t n_;
  bool directed_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<VertexId> out_targets_, in_sources_;
  std::vector<AttributeColumn> attributes_;
  std::vector<std::string> labels_;
};

struct LoadOptions {
  char delimiter = ',';
  // Id column of the attribute table. Empty selects the first column.
  std::string id_column;
  bool directed = false;
  // Only honoured for directed graphs.
  bool allow_self_loops = false;
  std::map<std::string, AttributeKind> kind_overrides;
};

// Reads a whitespace-separated edge list and a delimited attribute table.
// With an empty attribute path the vertex set is taken from the edge file in
// order of first appearance.
AttributedGraph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& attr_path,
                           const LoadOptions& options = {});

// Canonical writer; load_graph on its output reproduces the same graph.
void write_graph(const AttributedGraph& g, const std::filesystem::path& edge_path,
                 const std::filesystem::path& attr_path, char delimiter = ',');

// Number of edges with one endpoint in `a` and the other in `b`, each edge
// counted once. With a == b this is the number of edges inside `a`. Directed
// graphs count arcs u->v with u in `a` and v in `b`.
std::size_t count_edges_between(const AttributedGraph& g, const VertexSet& a, const VertexSet& b);

// Number of edges with exactly one endpoint in `a`.
std::size_t inter_edge_count(const AttributedGraph& g, const VertexSet& a);

}  // namespace sigraph
