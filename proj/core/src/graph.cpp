#include "sigraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sigraph/text.hpp"

namespace sigraph {

// ---------------------------------------------------------------------------
// AttributeColumn

AttributeColumn AttributeColumn::nominal(std::string name, std::span<const std::optional<std::string>> values) {
  AttributeColumn col;
  col.name = std::move(name);
  col.kind = AttributeKind::nominal;
  std::set<std::string> domain;
  for (const auto& v : values) {
    if (v) domain.insert(*v);
  }
  col.domain.assign(domain.begin(), domain.end());
  col.codes.reserve(values.size());
  for (const auto& v : values) {
    if (!v) {
      col.codes.push_back(missing_code);
    } else {
      auto it = std::lower_bound(col.domain.begin(), col.domain.end(), *v);
      col.codes.push_back(static_cast<int>(it - col.domain.begin()));
    }
  }
  return col;
}

AttributeColumn AttributeColumn::numeric(std::string name, std::span<const double> values) {
  AttributeColumn col;
  col.name = std::move(name);
  col.kind = AttributeKind::numeric;
  col.numbers.assign(values.begin(), values.end());
  for (double x : col.numbers) {
    if (std::isinf(x)) throw InputError("attribute '" + col.name + "' has a non-finite value");
  }
  return col;
}

bool AttributeColumn::is_missing(VertexId v) const {
  return kind == AttributeKind::nominal ? codes.at(v) == missing_code : std::isnan(numbers.at(v));
}

std::string AttributeColumn::value_text(VertexId v) const {
  if (is_missing(v)) return {};
  return kind == AttributeKind::nominal ? domain[static_cast<std::size_t>(codes[v])] : format_number(numbers[v]);
}

std::optional<int> AttributeColumn::code_of(std::string_view symbol) const {
  auto it = std::lower_bound(domain.begin(), domain.end(), symbol);
  if (it == domain.end() || *it != symbol) return std::nullopt;
  return static_cast<int>(it - domain.begin());
}

// ---------------------------------------------------------------------------
// AttributedGraph

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool reverse, std::vector<std::size_t>& offsets,
               std::vector<VertexId>& targets) {
  offsets.assign(n + 1, 0);
  for (const auto& [u, v] : edges) ++offsets[(reverse ? v : u) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  targets.assign(edges.size(), 0);
  auto fill = offsets;
  for (const auto& [u, v] : edges) {
    const auto src = reverse ? v : u;
    targets[fill[src]++] = reverse ? u : v;
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]),
              targets.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]));
  }
}

}  // namespace

AttributedGraph::AttributedGraph(std::size_t vertex_count, std::vector<Edge> edges, bool directed,
                                 std::vector<AttributeColumn> attributes, std::vector<std::string> labels,
                                 bool allow_self_loops)
    : n_(vertex_count), directed_(directed), attributes_(std::move(attributes)), labels_(std::move(labels)) {
  if (n_ > std::numeric_limits<VertexId>::max()) throw InputError("too many vertices");
  for (auto& e : edges) {
    if (e.first >= n_ || e.second >= n_) throw InputError("edge endpoint out of range");
    if (e.first == e.second && !(directed_ && allow_self_loops)) {
      throw InputError("self-loop on vertex " + std::to_string(e.first));
    }
    if (!directed_ && e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw InputError("duplicate edge " + std::to_string(dup->first) + " " + std::to_string(dup->second));
  }
  edges_ = std::move(edges);

  if (directed_) {
    build_csr(n_, edges_, false, out_offsets_, out_targets_);
    build_csr(n_, edges_, true, in_offsets_, in_sources_);
  } else {
    std::vector<Edge> both;
    both.reserve(edges_.size() * 2);
    for (const auto& [u, v] : edges_) {
      both.emplace_back(u, v);
      both.emplace_back(v, u);
    }
    build_csr(n_, both, false, out_offsets_, out_targets_);
  }

  if (labels_.empty()) {
    labels_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != n_) throw InputError("label count does not match vertex count");
  for (const auto& col : attributes_) {
    if (col.size() != n_) throw InputError("attribute '" + col.name + "' does not have one value per vertex");
  }
}

void AttributedGraph::check_vertex(VertexId u) const {
  if (u >= n_) throw std::out_of_range("vertex id " + std::to_string(u) + " out of range");
}

std::size_t AttributedGraph::out_degree(VertexId u) const {
  check_vertex(u);
  return out_offsets_[u + 1] - out_offsets_[u];
}

std::size_t AttributedGraph::in_degree(VertexId u) const {
  if (!directed_) return out_degree(u);
  check_vertex(u);
  return in_offsets_[u + 1] - in_offsets_[u];
}

std::size_t AttributedGraph::degree(VertexId u) const {
  return directed_ ? out_degree(u) + in_degree(u) : out_degree(u);
}

std::span<const VertexId> AttributedGraph::out_neighbors(VertexId u) const {
  check_vertex(u);
  return std::span<const VertexId>(out_targets_).subspan(out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]);
}

std::span<const VertexId> AttributedGraph::in_neighbors(VertexId u) const {
  if (!directed_) return out_neighbors(u);
  check_vertex(u);
  return std::span<const VertexId>(in_sources_).subspan(in_offsets_[u], in_offsets_[u + 1] - in_offsets_[u]);
}

bool AttributedGraph::has_edge(VertexId u, VertexId v) const {
  auto nb = out_neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<std::size_t> AttributedGraph::find_attribute(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loading and writing

namespace {

bool is_missing_token(std::string_view t) { return t.empty() || t == "NA" || t == "?"; }

bool is_integral(double x) { return std::floor(x) == x; }

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

AttributedGraph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& attr_path,
                           const LoadOptions& options) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> index;
  std::vector<AttributeColumn> columns;
  const bool have_attrs = !attr_path.empty();

  if (have_attrs) {
    const auto lines = read_lines(attr_path);
    std::size_t li = 0;
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li == lines.size()) throw InputError("attribute file " + attr_path.string() + " has no header");
    std::vector<std::string> header;
    for (auto h : split(lines[li], options.delimiter)) header.emplace_back(trim(h));
    ++li;

    std::size_t id_col = 0;
    if (!options.id_column.empty()) {
      auto it = std::find(header.begin(), header.end(), options.id_column);
      if (it == header.end()) throw InputError("id column '" + options.id_column + "' not in attribute header");
      id_col = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::vector<std::string>> raw(header.size());
    for (; li < lines.size(); ++li) {
      if (trim(lines[li]).empty()) continue;
      auto cells = split(lines[li], options.delimiter);
      if (cells.size() != header.size()) {
        throw InputError("ragged attribute table at line " + std::to_string(li + 1) + ": expected " +
                         std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
      }
      for (std::size_t c = 0; c < cells.size(); ++c) raw[c].emplace_back(trim(cells[c]));
    }

    for (const auto& label : raw[id_col]) {
      if (label.empty()) throw InputError("empty vertex id in attribute table");
      if (!index.emplace(label, static_cast<VertexId>(labels.size())).second) {
        throw InputError("duplicate vertex id '" + label + "' in attribute table");
      }
      labels.push_back(label);
    }

    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == id_col) continue;
      const auto& cells = raw[c];
      std::optional<AttributeKind> kind;
      if (auto it = options.kind_overrides.find(header[c]); it != options.kind_overrides.end()) kind = it->second;

      std::vector<double> numbers(cells.size(), std::numeric_limits<double>::quiet_NaN());
      bool all_numeric = true;
      bool any_fractional = false;
      for (std::size_t r = 0; r < cells.size(); ++r) {
        if (is_missing_token(cells[r])) continue;
        auto x = parse_number(cells[r]);
        if (!x) {
          all_numeric = false;
          continue;
        }
        numbers[r] = *x;
        any_fractional = any_fractional || !is_integral(*x);
      }
      // Integer-coded columns (years, binary flags, dorm ids) are categorical.
      if (!kind) kind = (all_numeric && any_fractional) ? AttributeKind::numeric : AttributeKind::nominal;

      if (*kind == AttributeKind::numeric) {
        if (!all_numeric) throw InputError("attribute '" + header[c] + "' forced numeric but has non-numeric values");
        columns.push_back(AttributeColumn::numeric(header[c], numbers));
      } else {
        std::vector<std::optional<std::string>> values;
        values.reserve(cells.size());
        for (const auto& cell : cells) {
          values.push_back(is_missing_token(cell) ? std::nullopt : std::optional<std::string>(cell));
        }
        columns.push_back(AttributeColumn::nominal(header[c], values));
      }
    }
  }

  std::vector<Edge> edges;
  const auto lines = read_lines(edge_path);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty() || line.front() == '#') continue;
    auto tokens = split_whitespace(line);
    if (tokens.size() != 2) {
      throw InputError("edge file line " + std::to_string(li + 1) + ": expected two vertex ids");
    }
    VertexId ends[2];
    for (int k = 0; k < 2; ++k) {
      std::string label(tokens[static_cast<std::size_t>(k)]);
      auto it = index.find(label);
      if (it == index.end()) {
        if (have_attrs) throw InputError("unknown vertex label '" + label + "' in edge file");
        it = index.emplace(label, static_cast<VertexId>(labels.size())).first;
        labels.push_back(label);
      }
      ends[k] = it->second;
    }
    if (ends[0] == ends[1] && !(options.directed && options.allow_self_loops)) {
      throw InputError("self-loop '" + std::string(tokens[0]) + " " + std::string(tokens[1]) + "' at edge file line " +
                       std::to_string(li + 1));
    }
    edges.emplace_back(ends[0], ends[1]);
  }

  const std::size_t n = labels.size();
  return AttributedGraph(n, std::move(edges), options.directed, std::move(columns), std::move(labels),
                         options.allow_self_loops);
}

void write_graph(const AttributedGraph& g, const std::filesystem::path& edge_path,
                 const std::filesystem::path& attr_path, char delimiter) {
  std::ofstream edges(edge_path);
  if (!edges) throw InputError("cannot write " + edge_path.string());
  for (const auto& [u, v] : g.edges()) edges << g.label(u) << ' ' << g.label(v) << '\n';

  std::ofstream attrs(attr_path);
  if (!attrs) throw InputError("cannot write " + attr_path.string());
  attrs << "id";
  for (const auto& col : g.attributes()) attrs << delimiter << col.name;
  attrs << '\n';
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    attrs << g.label(v);
    for (const auto& col : g.attributes()) attrs << delimiter << col.value_text(v);
    attrs << '\n';
  }
}

// ---------------------------------------------------------------------------
// Counting

std::size_t count_edges_between(const AttributedGraph& g, const VertexSet& a, const VertexSet& b) {
  std::size_t count = 0;
  if (g.directed()) {
    if (a.size() <= b.size()) {
      for (VertexId u : a.members()) {
        for (VertexId v : g.out_neighbors(u)) count += b.contains(v) ? 1 : 0;
      }
    } else {
      for (VertexId v : b.members()) {
        for (VertexId u : g.in_neighbors(v)) count += a.contains(u) ? 1 : 0;
      }
    }
    return count;
  }
  // Symmetric in a and b, so walk the smaller side.
  const VertexSet& small = a.size() <= b.size() ? a : b;
  const VertexSet& large = a.size() <= b.size() ? b : a;
  for (VertexId u : small.members()) {
    const bool u_in_large = large.contains(u);
    for (VertexId v : g.out_neighbors(u)) {
      if (!large.contains(v)) continue;
      // Edges reachable from both orientations are counted from the lower id.
      if (u_in_large && small.contains(v) && v < u) continue;
      ++count;
    }
  }
  return count;
}

std::size_t inter_edge_count(const AttributedGraph& g, const VertexSet& a) {
  std::size_t count = 0;
  for (VertexId u : a.members()) {
    for (VertexId v : g.out_neighbors(u)) count += a.contains(v) ? 0 : 1;
    if (g.directed()) {
      for (VertexId v : g.in_neighbors(u)) count += a.contains(v) ? 0 : 1;
    }
  }
  return count;
}

}  // namespace sigraph
