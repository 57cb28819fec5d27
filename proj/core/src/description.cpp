#include "sigraph/description.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "sigraph/text.hpp"

namespace sigraph {

namespace {
constexpr std::string_view kAnd = " \xE2\x88\xA7 ";  // " ∧ "
constexpr std::string_view kIn = "\xE2\x88\x88";     // "∈"
constexpr std::string_view kEmpty = "\xE2\x88\x85";  // "∅"
}  // namespace

Selector Selector::equals(std::size_t attribute, std::string attribute_name, int code, std::string symbol) {
  Selector s;
  s.attribute_ = attribute;
  s.attribute_name_ = std::move(attribute_name);
  s.code_ = code;
  s.symbol_ = std::move(symbol);
  return s;
}

Selector Selector::interval(std::size_t attribute, std::string attribute_name, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("interval selector needs finite bounds with lo < hi");
  }
  Selector s;
  s.attribute_ = attribute;
  s.attribute_name_ = std::move(attribute_name);
  s.is_interval_ = true;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

bool Selector::matches(const AttributedGraph& g, VertexId v) const {
  const auto& col = g.attribute(attribute_);
  if (is_interval_) {
    const double x = col.numbers[v];
    return !std::isnan(x) && x >= lo_ && x <= hi_;
  }
  return col.codes[v] == code_;
}

std::string Selector::render() const {
  if (is_interval_) {
    return attribute_name_ + std::string(kIn) + "[" + format_number(lo_) + "," + format_number(hi_) + "]";
  }
  return attribute_name_ + "=" + symbol_;
}

bool operator==(const Selector& a, const Selector& b) {
  if (a.attribute_ != b.attribute_ || a.is_interval_ != b.is_interval_) return false;
  return a.is_interval_ ? (a.lo_ == b.lo_ && a.hi_ == b.hi_) : a.code_ == b.code_;
}

bool operator<(const Selector& a, const Selector& b) {
  if (a.attribute_ != b.attribute_) return a.attribute_ < b.attribute_;
  if (a.is_interval_ != b.is_interval_) return !a.is_interval_;
  if (a.is_interval_) return std::tie(a.lo_, a.hi_) < std::tie(b.lo_, b.hi_);
  return a.code_ < b.code_;
}

VertexSet selector_extension(const Selector& s, const AttributedGraph& g) {
  const auto& col = g.attribute(s.attribute());
  if (s.is_interval() != (col.kind == AttributeKind::numeric)) {
    throw std::invalid_argument("selector kind does not match attribute '" + col.name + "'");
  }
  std::vector<VertexId> members;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (s.matches(g, v)) members.push_back(v);
  }
  return VertexSet::from_members(g.vertex_count(), members);
}

// ---------------------------------------------------------------------------

Description::Description(std::vector<Selector> selectors) : selectors_(std::move(selectors)) {
  std::sort(selectors_.begin(), selectors_.end());
  for (std::size_t i = 1; i < selectors_.size(); ++i) {
    if (selectors_[i].attribute() == selectors_[i - 1].attribute()) {
      throw std::invalid_argument("description constrains attribute '" + selectors_[i].attribute_name() + "' twice");
    }
  }
}

bool Description::constrains(std::size_t attribute) const { return selector_for(attribute) != nullptr; }

const Selector* Description::selector_for(std::size_t attribute) const {
  for (const auto& s : selectors_) {
    if (s.attribute() == attribute) return &s;
  }
  return nullptr;
}

std::string Description::render() const {
  if (selectors_.empty()) return std::string(kEmpty);
  std::string out;
  for (std::size_t i = 0; i < selectors_.size(); ++i) {
    if (i > 0) out += kAnd;
    out += selectors_[i].render();
  }
  return out;
}

std::optional<Description> refine(const Description& d, const Selector& s) {
  if (d.constrains(s.attribute())) return std::nullopt;
  std::vector<Selector> selectors(d.selectors().begin(), d.selectors().end());
  selectors.push_back(s);
  return Description(std::move(selectors));
}

VertexSet extension(const Description& d, const AttributedGraph& g) {
  return conjunction_extension(d.selectors(), g);
}

VertexSet conjunction_extension(std::span<const Selector> selectors, const AttributedGraph& g) {
  VertexSet result = VertexSet::full(g.vertex_count());
  for (const auto& s : selectors) result = result.intersect(selector_extension(s, g));
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// Linear-interpolation quantiles at i/bins, i = 0..bins, deduplicated.
std::vector<double> quantile_boundaries(std::vector<double> values, int bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> bounds;
  const double last = static_cast<double>(values.size() - 1);
  for (int i = 0; i <= bins; ++i) {
    const double pos = last * i / bins;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    double q = values[lo] + frac * (values[hi] - values[lo]);
    if (i == 0) q = values.front();
    if (i == bins) q = values.back();
    if (bounds.empty() || q > bounds.back()) bounds.push_back(q);
  }
  return bounds;
}

}  // namespace

std::vector<Selector> generate_selectors(const AttributedGraph& g, const SelectorConfig& cfg) {
  if (cfg.numeric_bins < 2) throw std::invalid_argument("numeric_bins must be at least 2");
  const std::size_t n = g.vertex_count();
  std::vector<Selector> out;
  const auto keep = [&](const Selector& s) {
    const auto ext = selector_extension(s, g);
    return !ext.empty() && ext.size() < n;
  };
  for (std::size_t a = 0; a < g.attributes().size(); ++a) {
    const auto& col = g.attribute(a);
    if (col.kind == AttributeKind::nominal) {
      for (std::size_t code = 0; code < col.domain.size(); ++code) {
        auto s = Selector::equals(a, col.name, static_cast<int>(code), col.domain[code]);
        if (keep(s)) out.push_back(std::move(s));
      }
      continue;
    }
    std::vector<double> present;
    for (double x : col.numbers) {
      if (!std::isnan(x)) present.push_back(x);
    }
    if (present.empty()) continue;
    const auto bounds = quantile_boundaries(std::move(present), cfg.numeric_bins);
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      for (std::size_t j = i + 1; j < bounds.size(); ++j) {
        auto s = Selector::interval(a, col.name, bounds[i], bounds[j]);
        if (keep(s)) out.push_back(std::move(s));
      }
    }
  }
  return out;
}

Description parse_description(std::string_view text, const AttributedGraph& g) {
  text = trim(text);
  if (text == kEmpty || text.empty()) return Description();
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(kAnd);
    if (pos == std::string_view::npos) {
      parts.push_back(text);
      break;
    }
    parts.push_back(text.substr(0, pos));
    text.remove_prefix(pos + kAnd.size());
  }

  std::vector<Selector> selectors;
  for (auto part : parts) {
    part = trim(part);
    // Longest attribute name followed by an operator wins, so names may
    // contain '=' themselves.
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < g.attributes().size(); ++a) {
      const auto& name = g.attribute(a).name;
      const std::string_view op = g.attribute(a).kind == AttributeKind::numeric ? kIn : std::string_view("=");
      if (part.size() > name.size() + op.size() && part.substr(0, name.size()) == name &&
          part.substr(name.size(), op.size()) == op) {
        if (!best || name.size() > g.attribute(*best).name.size()) best = a;
      }
    }
    if (!best) throw InputError("cannot parse selector '" + std::string(part) + "'");
    const auto& col = g.attribute(*best);
    if (col.kind == AttributeKind::nominal) {
      const auto value = part.substr(col.name.size() + 1);
      const auto code = col.code_of(value);
      if (!code) throw InputError("unknown value '" + std::string(value) + "' for attribute '" + col.name + "'");
      selectors.push_back(Selector::equals(*best, col.name, *code, std::string(value)));
    } else {
      auto body = part.substr(col.name.size() + kIn.size());
      if (body.size() < 5 || body.front() != '[' || body.back() != ']') {
        throw InputError("malformed interval in '" + std::string(part) + "'");
      }
      body = body.substr(1, body.size() - 2);
      const auto comma = body.find(',');
      if (comma == std::string_view::npos) throw InputError("malformed interval in '" + std::string(part) + "'");
      const auto lo = parse_number(body.substr(0, comma));
      const auto hi = parse_number(body.substr(comma + 1));
      if (!lo || !hi || !(*lo < *hi)) throw InputError("malformed interval in '" + std::string(part) + "'");
      selectors.push_back(Selector::interval(*best, col.name, *lo, *hi));
    }
  }
  try {
    return Description(std::move(selectors));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

}  // namespace sigraph

std::size_t std::hash<sigraph::Description>::operator()(const sigraph::Description& d) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  const auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& s : d.selectors()) {
    mix(s.attribute());
    if (s.is_interval()) {
      mix(std::hash<double>{}(s.lo()));
      mix(std::hash<double>{}(s.hi()));
    } else {
      mix(std::hash<int>{}(s.code()));
    }
  }
  return h;
}
