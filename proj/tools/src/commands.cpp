#include "sigraph_tools/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "sigraph/description.hpp"
#include "sigraph/interestingness.hpp"
#include "sigraph/text.hpp"
#include "sigraph_tools/report.hpp"

namespace sigraph::tools {

namespace {

// Output stream for `path`, or `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw InputError("cannot write '" + path + "'");
    out_ = &file_;
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

BackgroundModel read_model_file(const std::string& path, const AttributedGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read model file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  BackgroundModel model = [&] {
    try {
      return BackgroundModel::deserialize(text);
    } catch (const std::invalid_argument& e) {
      throw InputError("model file '" + path + "': " + e.what());
    }
  }();
  if (model.vertex_count() != g.vertex_count() || model.directed() != g.directed()) {
    throw InputError("model file '" + path + "' does not match the graph");
  }
  return model;
}

BackgroundModel model_for(const RunConfig& cfg, const AttributedGraph& g) {
  if (!cfg.model_path.empty()) return read_model_file(cfg.model_path, g);
  return fit_prior(g, parse_prior_spec(cfg.prior), cfg.fit);
}

SearchConfig search_config(const RunConfig& cfg, std::ostream& err) {
  SearchConfig s = cfg.search;
  if (cfg.progress) {
    s.progress = [&err](const SearchProgress& p) {
      err << "round " << p.round << " candidate " << p.candidate << "/" << p.total << ": " << p.description << '\n';
    };
  }
  return s;
}

void emit(const std::vector<nlohmann::ordered_json>& records, bool table, std::ostream& out) {
  if (table) {
    out << render_table(records);
    return;
  }
  for (const auto& r : records) out << r.dump() << '\n';
}

std::size_t limit(std::size_t top, std::size_t size) { return top == 0 ? size : std::min(top, size); }

}  // namespace

PriorSpec parse_prior_spec(std::string_view text) {
  text = trim(text);
  PriorSpec spec;
  if (text == "degree") {
    spec.kind = PriorKind::degree;
    return spec;
  }
  if (text == "density" || text.rfind("density:", 0) == 0) {
    spec.kind = PriorKind::density;
    if (text.size() > 7) {
      const auto p = parse_number(text.substr(8));
      if (!p || !(*p > 0 && *p < 1)) throw InputError("density prior needs a value in (0, 1)");
      spec.density = *p;
    }
    return spec;
  }
  if (text.rfind("blocks:", 0) == 0) {
    spec.kind = PriorKind::blocks;
    auto body = text.substr(7);
    const auto plus = body.find('+');
    if (plus != std::string_view::npos) {
      if (trim(body.substr(plus + 1)) != "degree") throw InputError("only '+degree' may follow a block prior");
      spec.with_degrees = true;
      body = body.substr(0, plus);
    }
    for (auto part : split(body, ',')) {
      part = trim(part);
      if (part.empty()) throw InputError("empty attribute name in block prior");
      spec.partitions.emplace_back(part);
    }
    if (spec.partitions.empty()) throw InputError("block prior needs at least one attribute");
    return spec;
  }
  throw InputError("unknown prior '" + std::string(text) + "' (degree | density[:p] | blocks:attr[,attr][+degree])");
}

ModeSpec parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "single") return {Mode::single, 1};
  if (text == "bi") return {Mode::bi, 1};
  if (text.rfind("iterate:", 0) == 0) {
    const auto rounds = parse_number(text.substr(8));
    if (!rounds || *rounds < 1 || *rounds != static_cast<int>(*rounds)) {
      throw InputError("iterate mode needs a positive round count");
    }
    return {Mode::iterate, static_cast<int>(*rounds)};
  }
  throw InputError("unknown mode '" + std::string(text) + "' (single | bi | iterate:<rounds>)");
}

AttributedGraph load_input(const GraphInput& input) {
  if (input.edges.empty()) throw InputError("no edge file given");
  LoadOptions options;
  options.delimiter = input.delimiter;
  options.id_column = input.id_column;
  options.directed = input.directed;
  options.allow_self_loops = input.self_loops;
  return load_graph(input.edges, input.attributes, options);
}

BackgroundModel fit_prior(const AttributedGraph& g, const PriorSpec& spec, const FitOptions& options) {
  switch (spec.kind) {
    case PriorKind::density: {
      double p = spec.density.value_or(0);
      if (!spec.density) {
        const double n = static_cast<double>(g.vertex_count());
        const double pairs = g.directed() ? n * (n - 1) : n * (n - 1) / 2;
        p = pairs > 0 ? static_cast<double>(g.edge_count()) / pairs : 0;
      }
      return fit_density_prior(g, p);
    }
    case PriorKind::degree:
      return fit_degree_prior(g, options);
    case PriorKind::blocks:
      return fit_block_prior(g, spec.partitions, spec.with_degrees, options);
  }
  throw std::logic_error("unhandled prior kind");
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto g = load_input(cfg.input);
  const auto model = fit_prior(g, parse_prior_spec(cfg.prior), cfg.fit);
  const auto& d = model.diagnostics();
  nlohmann::ordered_json report;
  report["prior"] = to_string(model.prior());
  report["vertices"] = g.vertex_count();
  report["edges"] = g.edge_count();
  report["iterations"] = d.iterations;
  report["max_degree_residual"] = d.max_degree_residual;
  report["max_block_residual"] = d.max_block_residual;
  report["classes"] = model.class_count();
  report["warnings"] = d.warnings;
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
  if (cfg.output.empty()) {
    out << model.serialize();
    err << report.dump() << '\n';
  } else {
    Sink sink(cfg.output, out);
    sink.stream() << model.serialize();
    out << report.dump() << '\n';
  }
  return kOk;
}

int cmd_mine(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto mode = parse_mode(cfg.mode);
  const auto g = load_input(cfg.input);
  const auto model = model_for(cfg, g);
  const auto selectors = generate_selectors(g, {cfg.numeric_bins});
  if (selectors.empty()) {
    err << "no selector splits the vertex set\n";
    return kEmptyResult;
  }
  auto search = search_config(cfg, err);
  search.objective = Measure::si;

  std::vector<nlohmann::ordered_json> records;
  std::string diagnostic;
  if (mode.mode == Mode::iterate) {
    const auto result = iterate(g, model, selectors, search, mode.rounds, cfg.absorb);
    for (std::size_t t = 0; t < result.rounds.size(); ++t) {
      const auto& patterns = result.rounds[t].patterns;
      for (std::size_t i = 0; i < limit(cfg.top, patterns.size()); ++i) {
        records.push_back(pattern_record(patterns[i], i + 1, static_cast<int>(t + 1)));
      }
    }
    diagnostic = result.diagnostic;
  } else {
    const auto result = mode.mode == Mode::single ? beam_search_single(g, model, selectors, search)
                                                  : nested_beam_search(g, model, selectors, search);
    for (std::size_t i = 0; i < limit(cfg.top, result.patterns.size()); ++i) {
      records.push_back(pattern_record(result.patterns[i], i + 1));
    }
    diagnostic = result.diagnostic;
  }
  if (!diagnostic.empty()) err << diagnostic << '\n';

  Sink sink(cfg.output, out);
  emit(records, cfg.table, sink.stream());
  return records.empty() ? kEmptyResult : kOk;
}

int cmd_baselines(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<Measure> measures;
  if (cfg.measures.empty()) {
    measures = {Measure::si,          Measure::edge_density, Measure::avg_degree,  Measure::pool,
                Measure::edge_surplus, Measure::segregation,  Measure::modularity1, Measure::inv_avg_odf,
                Measure::inv_conductance};
  } else {
    for (const auto& name : cfg.measures) {
      const auto m = parse_measure(name);
      if (!m || *m == Measure::dl) throw InputError("unknown measure '" + name + "'");
      measures.push_back(*m);
    }
  }
  const auto g = load_input(cfg.input);
  const auto model = model_for(cfg, g);
  const auto selectors = generate_selectors(g, {cfg.numeric_bins});
  if (selectors.empty()) {
    err << "no selector splits the vertex set\n";
    return kEmptyResult;
  }
  const std::size_t top = cfg.top == 0 ? 4 : cfg.top;

  std::vector<nlohmann::ordered_json> records;
  for (const auto m : measures) {
    auto search = search_config(cfg, err);
    search.objective = m;
    const auto result = beam_search_single(g, model, selectors, search);
    if (!result.diagnostic.empty()) err << measure_name(m) << ": " << result.diagnostic << '\n';
    for (std::size_t i = 0; i < std::min(top, result.patterns.size()); ++i) {
      records.push_back(pattern_record(result.patterns[i], i + 1, std::nullopt, m));
    }
  }
  Sink sink(cfg.output, out);
  emit(records, cfg.table, sink.stream());
  return records.empty() ? kEmptyResult : kOk;
}

int cmd_synth(const SynthParams& params, const std::string& prefix, std::ostream& out, std::ostream&) {
  if (prefix.empty()) throw InputError("synth needs an output prefix");
  const auto ds = [&] {
    try {
      return generate_synthetic(params);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  const std::string edges = prefix + ".edges";
  const std::string attrs = prefix + ".attrs.csv";
  const std::string manifest = prefix + ".manifest.json";
  write_graph(ds.graph, edges, attrs);

  nlohmann::ordered_json m;
  m["n"] = params.n;
  m["background_density"] = params.background_density;
  m["group_size"] = params.group_size;
  m["flags"] = params.flags;
  m["tags"] = params.tags;
  m["score"] = params.score;
  m["seed"] = params.seed;
  m["edges"] = ds.graph.edge_count();
  m["blocks"] = nlohmann::ordered_json::array();
  for (const auto& t : ds.truth) {
    nlohmann::ordered_json b;
    b["spec"] = render_planted_block(t.block);
    b["w1"] = render_side(t.block.attr_a, t.block.value_a);
    b["w2"] = render_side(t.block.attr_b, t.block.value_b);
    b["density"] = t.block.density;
    b["size1"] = t.side_a.size();
    b["size2"] = t.side_b.size();
    b["pairs"] = t.pairs;
    b["planted_edges"] = t.edges;
    m["blocks"].push_back(std::move(b));
  }
  std::ofstream f(manifest, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write '" + manifest + "'");
  f << m.dump(2) << '\n';
  out << edges << '\n' << attrs << '\n' << manifest << '\n';
  return kOk;
}

std::vector<BenchRow> run_bench(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg, Mode mode,
                                std::span<const std::size_t> schedule, int repeats) {
  if (repeats < 1) throw std::invalid_argument("bench needs at least one repeat");
  std::vector<BenchRow> rows;
  for (const std::size_t count : schedule) {
    if (count == 0 || count > selectors.size()) {
      throw InputError("schedule entry " + std::to_string(count) + " exceeds the " +
                       std::to_string(selectors.size()) + " available selectors");
    }
    const auto subset = selectors.first(count);
    BenchRow row;
    row.selectors = count;
    row.seconds = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto result =
          mode == Mode::single ? beam_search_single(g, model, subset, cfg) : nested_beam_search(g, model, subset, cfg);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      row.seconds = std::min(row.seconds, elapsed.count());
      row.evaluated = result.evaluated;
    }
    if (!rows.empty()) row.ratio = row.seconds / rows.back().seconds;
    rows.push_back(row);
  }
  return rows;
}

int cmd_bench(const RunConfig& cfg, const BenchOptions& bench, std::ostream& out, std::ostream&) {
  const auto mode = parse_mode(cfg.mode);
  if (mode.mode == Mode::iterate) throw InputError("bench supports the single and bi modes");
  const auto g = cfg.input.edges.empty() ? generate_synthetic(bench.synth).graph : load_input(cfg.input);
  const auto model = model_for(cfg, g);
  const auto selectors = generate_selectors(g, {cfg.numeric_bins});
  auto search = cfg.search;
  search.objective = Measure::si;
  const auto rows = run_bench(g, model, selectors, search, mode.mode, bench.schedule, bench.repeats);

  std::vector<nlohmann::ordered_json> records;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["selectors"] = r.selectors;
    j["seconds"] = r.seconds;
    j["ratio"] = r.ratio ? nlohmann::ordered_json(*r.ratio) : nlohmann::ordered_json(nullptr);
    j["evaluated"] = r.evaluated;
    records.push_back(std::move(j));
  }
  Sink sink(cfg.output, out);
  if (cfg.table) {
    sink.stream() << "selectors  seconds     ratio  evaluated\n";
    for (const auto& r : rows) {
      char line[96];
      std::snprintf(line, sizeof line, "%9zu  %9.4f  %6s  %9zu\n", r.selectors, r.seconds,
                    r.ratio ? format_number(std::round(*r.ratio * 100) / 100).c_str() : "-", r.evaluated);
      sink.stream() << line;
    }
  } else {
    for (const auto& j : records) sink.stream() << j.dump() << '\n';
  }
  return kOk;
}

}  // namespace sigraph::tools
