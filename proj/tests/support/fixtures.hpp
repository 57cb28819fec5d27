#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sigraph/graph.hpp"

namespace sigraph::testing {

inline AttributeColumn nominal_column(const std::string& name, const std::vector<std::string>& values) {
  std::vector<std::optional<std::string>> v(values.begin(), values.end());
  return AttributeColumn::nominal(name, v);
}

inline AttributedGraph plain_graph(std::size_t n, std::vector<Edge> edges, bool directed = false) {
  return AttributedGraph(n, std::move(edges), directed, {});
}

inline AttributedGraph triangle() { return plain_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
inline AttributedGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (VertexId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return plain_graph(n, e);
}
inline AttributedGraph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (VertexId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return plain_graph(leaves + 1, e);
}

// Circulant graph: every vertex joined to its k/2 nearest neighbours on each side.
inline AttributedGraph regular(std::size_t n, std::size_t k) {
  std::vector<Edge> e;
  for (VertexId u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= k / 2; ++j) {
      const VertexId v = static_cast<VertexId>((u + j) % n);
      e.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  return plain_graph(n, e);
}

// Attribute table of the 11-vertex example graph: numeric a, binary b, c, d.
inline std::vector<AttributeColumn> example_attributes() {
  const std::vector<double> a{3.5, 2.6, 3.8, 3.2, 1.8, 1.2, 5.4, 0.9, 6.7, 2.3, 3.1};
  return {AttributeColumn::numeric("a", a),
          nominal_column("b", {"1", "1", "1", "1", "1", "0", "0", "1", "0", "0", "0"}),
          nominal_column("c", {"0", "0", "1", "0", "0", "0", "1", "1", "1", "1", "1"}),
          nominal_column("d", {"1", "0", "1", "1", "1", "0", "0", "0", "0", "1", "0"})};
}

// 18 edges; the first six make {0,1,2,3} a clique.
inline std::vector<Edge> example_edges() {
  return {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5},  {5, 6},
          {6, 7}, {6, 8}, {7, 8}, {8, 9}, {9, 10}, {4, 10}, {2, 9}, {5, 10}, {1, 7}};
}

inline AttributedGraph example_graph() { return AttributedGraph(11, example_edges(), false, example_attributes()); }

// G(n, p) with random nominal attributes x (3 values) and y (2 values) and a
// numeric attribute z.
inline AttributedGraph random_graph(std::size_t n, double p, std::uint64_t seed, bool directed = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = directed ? 0 : u + 1; v < n; ++v) {
      if (u != v && unit(rng) < p) edges.emplace_back(u, v);
    }
  }
  std::vector<std::string> x(n), y(n);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::to_string(rng() % 3);
    y[i] = std::to_string(rng() % 2);
    z[i] = std::floor(unit(rng) * 1000) / 10.0 + 0.5;
  }
  return AttributedGraph(n, std::move(edges), directed,
                         {nominal_column("x", x), nominal_column("y", y), AttributeColumn::numeric("z", z)});
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sigraph_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path_ / name; }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name), std::ios::binary) << text;
    return file(name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace sigraph::testing
