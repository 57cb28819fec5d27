#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigraph/graph.hpp"
#include "sigraph/vertex_set.hpp"

namespace sigraph {

// Atomic predicate on one attribute: `name=value` on a nominal column or
// `name∈[lo,hi]` (closed) on a numeric column.
class Selector {
 public:
  static Selector equals(std::size_t attribute, std::string attribute_name, int code, std::string symbol);
  static Selector interval(std::size_t attribute, std::string attribute_name, double lo, double hi);

  std::size_t attribute() const { return attribute_; }
  const std::string& attribute_name() const { return attribute_name_; }
  bool is_interval() const { return is_interval_; }
  int code() const { return code_; }
  const std::string& symbol() const { return symbol_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  bool matches(const AttributedGraph& g, VertexId v) const;
  std::string render() const;

  friend bool operator==(const Selector& a, const Selector& b);
  friend bool operator<(const Selector& a, const Selector& b);

 private:
  std::size_t attribute_ = 0;
  std::string attribute_name_;
  bool is_interval_ = false;
  int code_ = 0;
  std::string symbol_;
  double lo_ = 0, hi_ = 0;
};

VertexSet selector_extension(const Selector& s, const AttributedGraph& g);

// Conjunction of selectors, at most one per attribute, kept sorted by
// attribute index so equal conjunctions compare and hash equal.
class Description {
 public:
  Description() = default;
  explicit Description(std::vector<Selector> selectors);

  std::size_t size() const { return selectors_.size(); }
  bool empty() const { return selectors_.empty(); }
  std::span<const Selector> selectors() const { return selectors_; }
  bool constrains(std::size_t attribute) const;
  const Selector* selector_for(std::size_t attribute) const;

  // Selectors joined with " ∧ ". The empty description renders as "∅".
  std::string render() const;

  friend bool operator==(const Description& a, const Description& b) { return a.selectors_ == b.selectors_; }

 private:
  std::vector<Selector> selectors_;
};

// d ∧ s, or nullopt when d already constrains s's attribute.
std::optional<Description> refine(const Description& d, const Selector& s);

VertexSet extension(const Description& d, const AttributedGraph& g);

// Extension of an arbitrary conjunction, including ones a Description would
// reject (e.g. two selectors on the same attribute). Empty span gives V.
VertexSet conjunction_extension(std::span<const Selector> selectors, const AttributedGraph& g);

struct SelectorConfig {
  int numeric_bins = 6;
};

// Equality selectors per nominal value and every quantile-boundary interval
// per numeric attribute. Selectors whose extension is empty or all of V are
// dropped. Deterministic: attribute order, then value or boundary order.
std::vector<Selector> generate_selectors(const AttributedGraph& g, const SelectorConfig& cfg = {});

// Inverse of Description::render against the attributes of `g`.
Description parse_description(std::string_view text, const AttributedGraph& g);

}  // namespace sigraph

template <>
struct std::hash<sigraph::Description> {
  std::size_t operator()(const sigraph::Description& d) const noexcept;
};
