#include "sigraph/background.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "sigraph/text.hpp"

namespace sigraph {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clamp_probability(double p) { return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor); }

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double clamp_multiplier(double x) { return std::clamp(x, -kMultiplierBound, kMultiplierBound); }

bool pair_in_block(const PairBlock& block, VertexId u, VertexId v, bool directed) {
  if (directed) return block.a.contains(u) && block.b.contains(v);
  return (block.a.contains(u) && block.b.contains(v)) || (block.b.contains(u) && block.a.contains(v));
}

constexpr std::size_t kMaxDenseClasses = 4096;

}  // namespace

const char* to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::density:
      return "density";
    case PriorKind::degree:
      return "degree";
    case PriorKind::blocks:
      return "blocks";
  }
  return "?";
}

const char* to_string(PairCounting counting) { return counting == PairCounting::ordered ? "ordered" : "unordered"; }

std::size_t native_pair_count(std::size_t size_a, std::size_t size_b, std::size_t overlap, bool directed) {
  if (directed) return size_a * size_b - overlap;
  return size_a * size_b - overlap * (overlap + 1) / 2;
}

// ---------------------------------------------------------------------------
// Probability index: vertices with identical parameters and identical
// membership in every absorbed block have identical pair probabilities, so
// block sums reduce to sums over class pairs.

struct BackgroundModel::Index {
  std::size_t class_count = 0;
  std::vector<std::uint32_t> class_of;
  std::vector<VertexId> representative;
  std::vector<double> log_odds;     // class_count^2, empty when too many classes
  std::vector<double> probability;  // clamped, same layout
};

void BackgroundModel::rebuild_index() {
  const std::size_t n = params_.vertex_count;
  auto index = std::make_shared<Index>();
  std::vector<const PatternUpdate*> active;
  for (const auto& up : updates_) {
    if (up.lambda != 0.0) active.push_back(&up);
  }
  std::map<std::vector<std::uint64_t>, std::uint32_t> classes;
  index->class_of.resize(n);
  std::vector<std::uint64_t> key;
  for (VertexId u = 0; u < n; ++u) {
    key.clear();
    key.push_back(params_.lambda_row.empty() ? 0 : std::bit_cast<std::uint64_t>(params_.lambda_row[u]));
    key.push_back(params_.lambda_col.empty() ? 0 : std::bit_cast<std::uint64_t>(params_.lambda_col[u]));
    key.push_back(params_.cell_of.empty() ? 0 : params_.cell_of[u]);
    std::uint64_t word = 0;
    int bits = 0;
    for (const auto* up : active) {
      word = (word << 2) | (up->block.a.contains(u) ? 2u : 0u) | (up->block.b.contains(u) ? 1u : 0u);
      bits += 2;
      if (bits == 64) {
        key.push_back(word);
        word = 0;
        bits = 0;
      }
    }
    if (bits > 0) key.push_back(word);
    auto [it, inserted] = classes.emplace(key, static_cast<std::uint32_t>(index->representative.size()));
    if (inserted) index->representative.push_back(u);
    index->class_of[u] = it->second;
  }
  const std::size_t k = index->representative.size();
  index->class_count = k;
  if (k <= kMaxDenseClasses) {
    index->log_odds.resize(k * k);
    index->probability.resize(k * k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < k; ++d) {
        const double x = raw_log_odds(index->representative[c], index->representative[d]);
        index->log_odds[c * k + d] = x;
        index->probability[c * k + d] = clamp_probability(sigmoid(x));
      }
    }
  }
  index_ = std::move(index);
}

BackgroundModel::BackgroundModel(Parameters params, FitDiagnostics diagnostics)
    : params_(std::move(params)), diagnostics_(std::move(diagnostics)) {
  const std::size_t n = params_.vertex_count;
  const auto check = [n](const auto& v, const char* what) {
    if (!v.empty() && v.size() != n) throw std::invalid_argument(std::string(what) + " size does not match vertices");
  };
  check(params_.lambda_row, "lambda_row");
  check(params_.lambda_col, "lambda_col");
  check(params_.cell_of, "cell_of");
  if (params_.cell_count == 0) params_.cell_count = 1;
  if (params_.gamma.empty()) params_.gamma.assign(params_.cell_count * params_.cell_count, 0.0);
  if (params_.gamma.size() != params_.cell_count * params_.cell_count) {
    throw std::invalid_argument("gamma size does not match cell count");
  }
  for (auto c : params_.cell_of) {
    if (c >= params_.cell_count) throw std::invalid_argument("cell id out of range");
  }
  rebuild_index();
}

double BackgroundModel::base_log_odds(VertexId u, VertexId v) const {
  double x = params_.offset;
  if (!params_.lambda_row.empty()) x += params_.lambda_row[u];
  if (!params_.lambda_col.empty()) x += params_.lambda_col[v];
  const std::size_t cu = params_.cell_of.empty() ? 0 : params_.cell_of[u];
  const std::size_t cv = params_.cell_of.empty() ? 0 : params_.cell_of[v];
  x += params_.gamma[cu * params_.cell_count + cv];
  return x;
}

double BackgroundModel::raw_log_odds(VertexId u, VertexId v) const {
  double x = base_log_odds(u, v);
  for (const auto& up : updates_) {
    if (pair_in_block(up.block, u, v, params_.directed)) x += up.lambda;
  }
  return x;
}

double BackgroundModel::log_odds(VertexId u, VertexId v) const {
  if (u >= params_.vertex_count || v >= params_.vertex_count) throw std::out_of_range("vertex id out of range");
  if (u == v) throw std::invalid_argument("edge probability of a self pair is undefined");
  return raw_log_odds(u, v);
}

double BackgroundModel::edge_probability(VertexId u, VertexId v) const {
  return clamp_probability(sigmoid(log_odds(u, v)));
}

std::size_t BackgroundModel::class_count() const { return index_->class_count; }

struct BackgroundModel::WeightedLogOdds {
  double log_odds;
  double weight;
  std::size_t dense_slot;  // index into the dense tables, or npos
};

// Class-pair weights of a block: the number of native pairs of the block whose
// endpoints fall in classes (c, d).
std::vector<BackgroundModel::WeightedLogOdds> BackgroundModel::block_weights(const PairBlock& block) const {
  const Index& ix = *index_;
  const std::size_t k = ix.class_count;
  std::vector<double> ha(k, 0), hb(k, 0), hc(k, 0);
  std::vector<std::uint32_t> nza, nzb;
  for (VertexId u : block.a.members()) {
    const auto c = ix.class_of[u];
    if (ha[c]++ == 0) nza.push_back(c);
    if (block.b.contains(u)) hc[c] += 1;
  }
  for (VertexId u : block.b.members()) {
    const auto c = ix.class_of[u];
    if (hb[c]++ == 0) nzb.push_back(c);
  }
  std::sort(nza.begin(), nza.end());
  std::sort(nzb.begin(), nzb.end());
  const bool directed = params_.directed;
  const bool dense = !ix.log_odds.empty();
  std::vector<WeightedLogOdds> out;
  out.reserve(nza.size() * nzb.size());
  for (auto c : nza) {
    for (auto d : nzb) {
      double w = ha[c] * hb[d];
      if (!directed) w -= 0.5 * hc[c] * hc[d];
      if (c == d) w -= directed ? hc[c] : 0.5 * hc[c];
      if (w <= 0) continue;
      if (dense) {
        const std::size_t slot = static_cast<std::size_t>(c) * k + d;
        out.push_back({ix.log_odds[slot], w, slot});
      } else {
        out.push_back({raw_log_odds(ix.representative[c], ix.representative[d]), w, std::string::npos});
      }
    }
  }
  return out;
}

double BackgroundModel::expected_count(const PairBlock& block, double shift) const {
  if (block.a.universe() != params_.vertex_count || block.b.universe() != params_.vertex_count) {
    throw std::invalid_argument("pair block does not match the model's vertex count");
  }
  const auto weights = block_weights(block);
  double sum = 0;
  for (const auto& w : weights) {
    const double p = (shift == 0.0 && w.dense_slot != std::string::npos)
                         ? index_->probability[w.dense_slot]
                         : clamp_probability(sigmoid(w.log_odds + shift));
    sum += w.weight * p;
  }
  return sum;
}

BackgroundModel BackgroundModel::with_update(PairBlock block, std::size_t observed, std::string label) const {
  if (block.a.universe() != params_.vertex_count || block.b.universe() != params_.vertex_count) {
    throw std::invalid_argument("pair block does not match the model's vertex count");
  }
  const std::size_t overlap = block.a.intersection_size(block.b);
  const std::size_t pairs = native_pair_count(block.a.size(), block.b.size(), overlap, params_.directed);
  if (pairs == 0) throw std::invalid_argument("cannot absorb a pattern with an empty pair set");
  if (observed > pairs) throw std::invalid_argument("observed count exceeds the number of pairs");

  BackgroundModel next = *this;
  const double scale = std::max(1.0, static_cast<double>(pairs));
  const double target = static_cast<double>(observed);
  const auto weights = block_weights(block);
  const auto g = [&](double lambda) {
    double sum = 0;
    for (const auto& w : weights) sum += w.weight * clamp_probability(sigmoid(w.log_odds + lambda));
    return sum - target;
  };

  double lambda = 0;
  if (observed == 0 || observed == pairs) {
    lambda = observed == 0 ? -kMultiplierBound : kMultiplierBound;
    next.diagnostics_.warnings.push_back("pattern '" + label + "' has " + (observed == 0 ? "no" : "every") +
                                         " possible edge; multiplier clamped at " + format_number(lambda));
  } else if (std::abs(g(0)) > 1e-9 * scale) {
    double lo = -1, hi = 1;
    while (g(lo) > 0 && lo > -kMultiplierBound) lo = std::max(2 * lo, -kMultiplierBound);
    while (g(hi) < 0 && hi < kMultiplierBound) hi = std::min(2 * hi, kMultiplierBound);
    if (g(lo) > 0 || g(hi) < 0) {
      lambda = g(lo) > 0 ? lo : hi;
      next.diagnostics_.warnings.push_back("pattern '" + label + "' multiplier hit the bound " + format_number(lambda));
    } else {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        lambda = mid;
        if (gm == 0 || std::abs(gm) <= 1e-13 * scale) break;
        if (gm < 0) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mid))) break;
      }
    }
  }
  next.updates_.push_back({std::move(block), lambda, observed, std::move(label)});
  next.rebuild_index();
  return next;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kMagic = "sigraph-background-model";
constexpr int kFormatVersion = 1;

void write_numbers(std::ostringstream& out, std::string_view key, std::span<const double> values) {
  out << key << ' ' << values.size();
  for (double x : values) out << ' ' << format_number(x);
  out << '\n';
}

void write_ids(std::ostringstream& out, std::string_view key, std::span<const VertexId> ids) {
  out << key << ' ' << ids.size();
  for (auto x : ids) out << ' ' << x;
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty line split as key + rest.
  std::pair<std::string_view, std::string_view> next() {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      auto line = trim(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_no_;
      if (line.empty()) continue;
      const auto space = line.find(' ');
      if (space == std::string_view::npos) return {line, {}};
      return {line.substr(0, space), trim(line.substr(space + 1))};
    }
    throw InputError("model file truncated");
  }

  std::string_view expect(std::string_view key) {
    auto [k, rest] = next();
    if (k != key) {
      throw InputError("model file line " + std::to_string(line_no_) + ": expected '" + std::string(key) + "', got '" +
                       std::string(k) + "'");
    }
    return rest;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<double> parse_number_list(std::string_view rest) {
  auto tokens = split_whitespace(rest);
  if (tokens.empty()) throw InputError("model file: missing count");
  const auto count = parse_number(tokens[0]);
  if (!count || *count != static_cast<double>(tokens.size() - 1)) throw InputError("model file: bad list length");
  std::vector<double> out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto x = parse_number(tokens[i]);
    if (!x) throw InputError("model file: bad number '" + std::string(tokens[i]) + "'");
    out.push_back(*x);
  }
  return out;
}

std::vector<VertexId> parse_id_list(std::string_view rest) {
  std::vector<VertexId> out;
  for (double x : parse_number_list(rest)) {
    if (x < 0 || std::floor(x) != x) throw InputError("model file: bad vertex id");
    out.push_back(static_cast<VertexId>(x));
  }
  return out;
}

std::size_t parse_count(std::string_view text) {
  auto x = parse_number(text);
  if (!x || *x < 0 || std::floor(*x) != *x) throw InputError("model file: bad count '" + std::string(text) + "'");
  return static_cast<std::size_t>(*x);
}

}  // namespace

std::string BackgroundModel::serialize() const {
  std::ostringstream out;
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "prior " << to_string(params_.prior) << '\n';
  out << "directed " << (params_.directed ? 1 : 0) << '\n';
  out << "vertices " << params_.vertex_count << '\n';
  out << "offset " << format_number(params_.offset) << '\n';
  write_numbers(out, "lambda_row", params_.lambda_row);
  write_numbers(out, "lambda_col", params_.lambda_col);
  out << "partitions " << params_.partitions.size();
  for (const auto& p : params_.partitions) out << ' ' << p;
  out << '\n';
  out << "cells " << params_.cell_count << '\n';
  out << "cell_of " << params_.cell_of.size();
  for (auto c : params_.cell_of) out << ' ' << c;
  out << '\n';
  write_numbers(out, "gamma", params_.gamma);
  out << "updates " << updates_.size() << '\n';
  for (const auto& up : updates_) {
    out << "update " << format_number(up.lambda) << ' ' << up.observed << '\n';
    out << "label " << up.label << '\n';
    write_ids(out, "set_a", up.block.a.members());
    write_ids(out, "set_b", up.block.b.members());
  }
  out << "end\n";
  return out.str();
}

BackgroundModel BackgroundModel::deserialize(std::string_view text) {
  LineReader reader(text);
  auto [magic, version] = reader.next();
  if (magic != kMagic) throw InputError("not a background model file");
  if (version != std::to_string(kFormatVersion)) {
    throw InputError("unsupported model format version '" + std::string(version) + "'");
  }
  Parameters p;
  const auto prior = reader.expect("prior");
  if (prior == "density") {
    p.prior = PriorKind::density;
  } else if (prior == "degree") {
    p.prior = PriorKind::degree;
  } else if (prior == "blocks") {
    p.prior = PriorKind::blocks;
  } else {
    throw InputError("unknown prior '" + std::string(prior) + "'");
  }
  p.directed = reader.expect("directed") == "1";
  p.vertex_count = parse_count(reader.expect("vertices"));
  const auto offset = parse_number(reader.expect("offset"));
  if (!offset) throw InputError("model file: bad offset");
  p.offset = *offset;
  p.lambda_row = parse_number_list(reader.expect("lambda_row"));
  p.lambda_col = parse_number_list(reader.expect("lambda_col"));
  {
    auto tokens = split_whitespace(reader.expect("partitions"));
    if (tokens.empty() || parse_count(tokens[0]) != tokens.size() - 1) throw InputError("model file: bad partitions");
    for (std::size_t i = 1; i < tokens.size(); ++i) p.partitions.emplace_back(tokens[i]);
  }
  p.cell_count = parse_count(reader.expect("cells"));
  for (auto id : parse_id_list(reader.expect("cell_of"))) p.cell_of.push_back(id);
  p.gamma = parse_number_list(reader.expect("gamma"));

  std::vector<PatternUpdate> updates;
  const auto count = parse_count(reader.expect("updates"));
  for (std::size_t i = 0; i < count; ++i) {
    auto tokens = split_whitespace(reader.expect("update"));
    if (tokens.size() != 2) throw InputError("model file: bad update line");
    const auto lambda = parse_number(tokens[0]);
    if (!lambda) throw InputError("model file: bad update multiplier");
    PatternUpdate up;
    up.lambda = *lambda;
    up.observed = parse_count(tokens[1]);
    up.label = std::string(reader.expect("label"));
    const auto a = parse_id_list(reader.expect("set_a"));
    const auto b = parse_id_list(reader.expect("set_b"));
    up.block = {VertexSet::from_members(p.vertex_count, a), VertexSet::from_members(p.vertex_count, b)};
    updates.push_back(std::move(up));
  }
  reader.expect("end");

  BackgroundModel model(std::move(p));
  model.updates_ = std::move(updates);
  model.rebuild_index();
  return model;
}

// ---------------------------------------------------------------------------
// Fitting: cyclic coordinate-wise Newton on the convex dual
//   F(theta) = sum_groups pairs * softplus(x_group) - sum_j theta_j * target_j
// where x_group is the log-odds shared by every pair of the group. Vertices
// with the same constraint signature share their multipliers, so groups are
// pairs of vertex classes.

namespace {

struct DualFit {
  struct Group {
    double pairs = 0;
    double x = 0;
    int nv = 0;
    int var[3] = {-1, -1, -1};
    double coef[3] = {0, 0, 0};

    void add(int v, double c) {
      if (v < 0) return;
      for (int i = 0; i < nv; ++i) {
        if (var[i] == v) {
          coef[i] += c;
          return;
        }
      }
      var[nv] = v;
      coef[nv] = c;
      ++nv;
    }
  };

  struct Var {
    double theta = 0;
    double target = 0;
    double normalizer = 1;
    bool fixed = false;
    bool is_block = false;
    std::string name;
    std::vector<std::pair<int, double>> groups;  // (group, coefficient)
  };

  std::vector<Group> groups;
  std::vector<Var> vars;

  int add_var(double init, double target, double normalizer, bool is_block, std::string name) {
    Var v;
    v.theta = clamp_multiplier(init);
    v.target = target;
    v.normalizer = normalizer;
    v.is_block = is_block;
    v.name = std::move(name);
    vars.push_back(std::move(v));
    return static_cast<int>(vars.size() - 1);
  }

  void finalize() {
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      auto& g = groups[gi];
      g.x = 0;
      for (int i = 0; i < g.nv; ++i) {
        g.x += g.coef[i] * vars[static_cast<std::size_t>(g.var[i])].theta;
        vars[static_cast<std::size_t>(g.var[i])].groups.emplace_back(static_cast<int>(gi), g.coef[i]);
      }
    }
  }

  double gradient(const Var& v) const {
    double grad = -v.target;
    for (auto [gi, c] : v.groups) {
      const auto& g = groups[static_cast<std::size_t>(gi)];
      grad += c * g.pairs * sigmoid(g.x);
    }
    return grad;
  }

  // One damped Newton step on variable j.
  void step(Var& v) {
    double grad = -v.target, hess = 0;
    for (auto [gi, c] : v.groups) {
      const auto& g = groups[static_cast<std::size_t>(gi)];
      const double p = sigmoid(g.x);
      grad += c * g.pairs * p;
      hess += c * c * g.pairs * p * (1 - p);
    }
    if (!(hess > 1e-300)) return;
    double delta = clamp_multiplier(v.theta - grad / hess) - v.theta;
    double scale = 0;
    for (auto [gi, c] : v.groups) scale += groups[static_cast<std::size_t>(gi)].pairs;
    for (int halvings = 0; halvings < 60 && delta != 0.0; ++halvings) {
      double change = -delta * v.target;
      for (auto [gi, c] : v.groups) {
        const auto& g = groups[static_cast<std::size_t>(gi)];
        change += g.pairs * (softplus(g.x + c * delta) - softplus(g.x));
      }
      if (change <= 1e-13 * scale) break;
      delta *= 0.5;
    }
    if (delta == 0.0) return;
    v.theta += delta;
    for (auto [gi, c] : v.groups) groups[static_cast<std::size_t>(gi)].x += c * delta;
  }

  struct Outcome {
    int iterations = 0;
    double worst_vertex = 0, worst_block = 0;
    std::string worst_name;
    bool converged = false;
  };

  Outcome residuals() const {
    Outcome o;
    double worst = -1;
    for (const auto& v : vars) {
      if (v.fixed) continue;
      const double r = std::abs(gradient(v)) / v.normalizer;
      (v.is_block ? o.worst_block : o.worst_vertex) = std::max(v.is_block ? o.worst_block : o.worst_vertex, r);
      if (r > worst) {
        worst = r;
        o.worst_name = v.name;
      }
    }
    return o;
  }

  // Sweeps until the residuals are well below `tol`; converged means within
  // `tol` when the sweeps stop.
  Outcome solve(const FitOptions& options) {
    const double target = std::max(options.tol * 1e-3, 1e-12);
    Outcome o = residuals();
    for (int it = 1; it <= options.max_iter; ++it) {
      if (std::max(o.worst_vertex, o.worst_block) <= target) {
        o.converged = true;
        o.iterations = it - 1;
        return o;
      }
      for (auto& v : vars) {
        if (!v.fixed) step(v);
      }
      o = residuals();
      o.iterations = it;
    }
    o.converged = std::max(o.worst_vertex, o.worst_block) <= options.tol;
    return o;
  }
};

struct ClassKey {
  std::size_t out = 0, in = 0;
  std::uint32_t cell = 0;
  auto operator<=>(const ClassKey&) const = default;
};

// Shared driver for degree and block priors.
BackgroundModel fit_constraints(const AttributedGraph& g, bool degrees, std::span<const std::string> partitions,
                                const FitOptions& options) {
  const std::size_t n = g.vertex_count();
  const bool directed = g.directed();
  if (n < 2) throw std::invalid_argument("fitting needs at least two vertices");
  if (g.edge_count() == 0) throw std::invalid_argument("fitting needs at least one edge");

  // Cells: intersections of the bins of every listed partition.
  std::vector<std::uint32_t> cell_of(n, 0);
  std::size_t cell_count = 1;
  if (!partitions.empty()) {
    std::vector<std::size_t> cols;
    for (const auto& name : partitions) {
      auto idx = g.find_attribute(name);
      if (!idx) throw std::invalid_argument("unknown partition attribute '" + name + "'");
      if (g.attribute(*idx).kind != AttributeKind::nominal) {
        throw std::invalid_argument("partition attribute '" + name + "' is not nominal");
      }
      cols.push_back(*idx);
    }
    std::map<std::vector<int>, std::uint32_t> cells;
    std::vector<std::vector<int>> keys(n);
    for (VertexId u = 0; u < n; ++u) {
      for (auto c : cols) keys[u].push_back(g.attribute(c).codes[u]);
      cells.emplace(keys[u], 0);
    }
    std::uint32_t next = 0;
    for (auto& [key, id] : cells) id = next++;
    for (VertexId u = 0; u < n; ++u) cell_of[u] = cells.at(keys[u]);
    cell_count = cells.size();
  }

  // Degrees without self-loops; the model has no self pairs.
  std::vector<std::size_t> out_deg(n, 0), in_deg(n, 0);
  std::vector<double> observed_block(cell_count * cell_count, 0);
  for (const auto& [u, v] : g.edges()) {
    if (u == v) continue;
    ++out_deg[u];
    ++in_deg[v];
    if (directed) {
      observed_block[cell_of[u] * cell_count + cell_of[v]] += 1;
    } else {
      const auto a = std::min(cell_of[u], cell_of[v]);
      const auto b = std::max(cell_of[u], cell_of[v]);
      observed_block[a * cell_count + b] += 1;
    }
  }
  if (!directed) {
    for (VertexId u = 0; u < n; ++u) {
      out_deg[u] += in_deg[u];
      in_deg[u] = out_deg[u];
    }
  }

  // Vertex classes.
  std::map<ClassKey, std::uint32_t> class_ids;
  std::vector<std::uint32_t> class_of(n);
  for (VertexId u = 0; u < n; ++u) {
    ClassKey key{degrees ? out_deg[u] : 0, degrees && directed ? in_deg[u] : 0, cell_of[u]};
    class_ids.emplace(key, 0);
  }
  std::vector<ClassKey> class_keys;
  for (auto& [key, id] : class_ids) {
    id = static_cast<std::uint32_t>(class_keys.size());
    class_keys.push_back(key);
  }
  const std::size_t k = class_keys.size();
  std::vector<double> class_size(k, 0);
  std::vector<VertexId> class_rep(k, 0);
  for (VertexId u = 0; u < n; ++u) {
    ClassKey key{degrees ? out_deg[u] : 0, degrees && directed ? in_deg[u] : 0, cell_of[u]};
    class_of[u] = class_ids.at(key);
    if (class_size[class_of[u]]++ == 0) class_rep[class_of[u]] = u;
  }

  DualFit fit;
  FitDiagnostics diag;
  const double max_degree = static_cast<double>(n - 1);
  std::vector<int> row_var(k, -1), col_var(k, -1);
  if (degrees) {
    const auto make_vertex_var = [&](double degree, double size, VertexId rep, const char* what) {
      const double p0 = std::clamp(degree / max_degree, 1e-300, 1.0);
      const int id = fit.add_var(p0 >= 1.0 ? kMultiplierBound : logit(p0), size * degree, size, false,
                                 std::string(what) + " of vertex '" + g.label(rep) + "' (degree " +
                                     format_number(degree) + ")");
      auto& v = fit.vars.back();
      if (degree == 0 || degree == max_degree) {
        v.fixed = true;
        v.theta = degree == 0 ? -kMultiplierBound : kMultiplierBound;
        diag.warnings.push_back(v.name + " is extremal; multiplier clamped at " + format_number(v.theta));
      }
      return id;
    };
    for (std::size_t c = 0; c < k; ++c) {
      const auto& key = class_keys[c];
      if (directed) {
        row_var[c] = make_vertex_var(static_cast<double>(key.out), class_size[c], class_rep[c], "out-degree");
        col_var[c] = make_vertex_var(static_cast<double>(key.in), class_size[c], class_rep[c], "in-degree");
      } else {
        row_var[c] = make_vertex_var(static_cast<double>(key.out), class_size[c], class_rep[c], "degree");
        col_var[c] = row_var[c];
      }
    }
  }

  std::vector<double> cell_size(cell_count, 0);
  for (VertexId u = 0; u < n; ++u) cell_size[cell_of[u]] += 1;
  std::vector<int> block_var(cell_count * cell_count, -1);
  if (!partitions.empty()) {
    for (std::size_t a = 0; a < cell_count; ++a) {
      for (std::size_t b = directed ? 0 : a; b < cell_count; ++b) {
        const double pairs = a != b ? cell_size[a] * cell_size[b]
                                    : (directed ? cell_size[a] * (cell_size[a] - 1)
                                                : cell_size[a] * (cell_size[a] - 1) / 2);
        if (pairs == 0) continue;  // gamma stays 0
        const double obs = observed_block[a * cell_count + b];
        const double init = degrees ? 0.0 : logit(std::clamp(obs / pairs, 1e-13, 1 - 1e-13));
        const int id = fit.add_var(init, obs, 1.0, true,
                                   "block (" + std::to_string(a) + "," + std::to_string(b) + ")");
        auto& v = fit.vars.back();
        if (obs == 0 || obs == pairs) {
          v.fixed = true;
          v.theta = obs == 0 ? -kMultiplierBound : kMultiplierBound;
          diag.warnings.push_back(v.name + " is " + (obs == 0 ? "empty" : "complete") + "; multiplier clamped at " +
                                  format_number(v.theta));
        }
        block_var[a * cell_count + b] = id;
        if (!directed) block_var[b * cell_count + a] = id;
      }
    }
  }

  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = directed ? 0 : c; d < k; ++d) {
      double pairs = 0;
      if (c != d) {
        pairs = class_size[c] * class_size[d];
      } else {
        pairs = directed ? class_size[c] * (class_size[c] - 1) : class_size[c] * (class_size[c] - 1) / 2;
      }
      if (pairs == 0) continue;
      DualFit::Group grp;
      grp.pairs = pairs;
      grp.add(row_var[c], 1.0);
      grp.add(col_var[d], 1.0);
      grp.add(block_var[class_keys[c].cell * cell_count + class_keys[d].cell], 1.0);
      fit.groups.push_back(grp);
    }
  }
  fit.finalize();

  const auto outcome = fit.solve(options);
  if (!outcome.converged) {
    throw FitError("fit did not converge after " + std::to_string(options.max_iter) +
                   " sweeps; worst constraint: " + outcome.worst_name + " with residual " +
                   format_number(std::max(outcome.worst_vertex, outcome.worst_block)));
  }
  diag.iterations = outcome.iterations;
  diag.max_degree_residual = outcome.worst_vertex;
  diag.max_block_residual = outcome.worst_block;

  BackgroundModel::Parameters params;
  params.prior = partitions.empty() ? PriorKind::degree : PriorKind::blocks;
  params.directed = directed;
  params.vertex_count = n;
  if (degrees) {
    params.lambda_row.resize(n);
    params.lambda_col.resize(n);
    for (VertexId u = 0; u < n; ++u) {
      params.lambda_row[u] = fit.vars[static_cast<std::size_t>(row_var[class_of[u]])].theta;
      params.lambda_col[u] = fit.vars[static_cast<std::size_t>(col_var[class_of[u]])].theta;
    }
  }
  params.partitions.assign(partitions.begin(), partitions.end());
  params.cell_count = cell_count;
  if (!partitions.empty()) params.cell_of = cell_of;
  params.gamma.assign(cell_count * cell_count, 0.0);
  for (std::size_t i = 0; i < block_var.size(); ++i) {
    if (block_var[i] >= 0) params.gamma[i] = fit.vars[static_cast<std::size_t>(block_var[i])].theta;
  }
  return BackgroundModel(std::move(params), std::move(diag));
}

}  // namespace

BackgroundModel fit_density_prior(const AttributedGraph& g, double density) {
  if (!(density > 0 && density < 1)) throw std::invalid_argument("density must lie strictly between 0 and 1");
  BackgroundModel::Parameters params;
  params.prior = PriorKind::density;
  params.directed = g.directed();
  params.vertex_count = g.vertex_count();
  params.offset = logit(density);
  return BackgroundModel(std::move(params));
}

BackgroundModel fit_degree_prior(const AttributedGraph& g, const FitOptions& options) {
  return fit_constraints(g, true, {}, options);
}

BackgroundModel fit_block_prior(const AttributedGraph& g, std::span<const std::string> partitions, bool with_degrees,
                                const FitOptions& options) {
  if (partitions.empty()) throw std::invalid_argument("block prior needs at least one partition attribute");
  return fit_constraints(g, with_degrees, partitions, options);
}

BlockMean block_mean_probability(const BackgroundModel& model, const VertexSet& a, const VertexSet& b,
                                 PairCounting counting) {
  const std::size_t overlap = a.intersection_size(b);
  const std::size_t native = native_pair_count(a.size(), b.size(), overlap, model.directed());
  if (native == 0) throw std::invalid_argument("block has no vertex pairs");
  const double sum = model.expected_count({a, b});
  const std::size_t factor = (!model.directed() && counting == PairCounting::ordered) ? 2 : 1;
  return {sum / static_cast<double>(native), native * factor};
}

BackgroundModel update_with_pattern(const BackgroundModel& model, const VertexSet& a, const VertexSet& b,
                                    std::size_t observed, std::string label) {
  return model.with_update({a, b}, observed, std::move(label));
}

}  // namespace sigraph
