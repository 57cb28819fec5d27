#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigraph/background.hpp"
#include "sigraph/graph.hpp"
#include "sigraph/search.hpp"
#include "sigraph/synthetic.hpp"

namespace sigraph::tools {

enum ExitCode : int { kOk = 0, kInputError = 1, kFitFailure = 2, kEmptyResult = 3 };

struct GraphInput {
  std::string edges;
  std::string attributes;
  char delimiter = ',';
  std::string id_column;
  bool directed = false;
  bool self_loops = false;
};

// degree | density[:<p>] | blocks:<attr>[,<attr>...][+degree]
struct PriorSpec {
  PriorKind kind = PriorKind::degree;
  std::optional<double> density;  // observed density when unset
  std::vector<std::string> partitions;
  bool with_degrees = false;
};

PriorSpec parse_prior_spec(std::string_view text);

enum class Mode { single, bi, iterate };

// single | bi | iterate:<rounds>
struct ModeSpec {
  Mode mode = Mode::single;
  int rounds = 1;
};

ModeSpec parse_mode(std::string_view text);

struct RunConfig {
  GraphInput input;
  std::string prior = "degree";
  std::string model_path;  // use a fitted model instead of `prior`
  FitOptions fit;
  SearchConfig search;
  int numeric_bins = 6;
  std::string mode = "single";
  std::size_t absorb = 1;
  std::string output;  // empty = standard output
  bool table = false;
  std::size_t top = 0;  // 0 = every pattern found
  bool progress = false;
  std::vector<std::string> measures;  // baselines; empty = all
  std::uint64_t seed = 1;
};

AttributedGraph load_input(const GraphInput& input);
BackgroundModel fit_prior(const AttributedGraph& g, const PriorSpec& spec, const FitOptions& options);

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mine(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_baselines(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Writes <prefix>.edges, <prefix>.attrs.csv and <prefix>.manifest.json.
int cmd_synth(const SynthParams& params, const std::string& prefix, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::size_t selectors = 0;
  double seconds = 0;      // fastest repeat
  std::optional<double> ratio;  // seconds / previous row's seconds
  std::size_t evaluated = 0;
};

// Times the search with the selector list truncated to each schedule entry.
std::vector<BenchRow> run_bench(const AttributedGraph& g, const BackgroundModel& model,
                                std::span<const Selector> selectors, const SearchConfig& cfg, Mode mode,
                                std::span<const std::size_t> schedule, int repeats);

struct BenchOptions {
  std::vector<std::size_t> schedule{50, 100, 200, 400};
  int repeats = 3;
  SynthParams synth;  // used when no input graph is given
};

int cmd_bench(const RunConfig& cfg, const BenchOptions& bench, std::ostream& out, std::ostream& err);

}  // namespace sigraph::tools
