#include "sigraph_tools/app.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "sigraph_tools/commands.hpp"

namespace sigraph::tools {

namespace {

void add_input_options(CLI::App& cmd, GraphInput& in) {
  cmd.add_option("--edges", in.edges, "Edge list, one 'u v' pair per line")->required();
  cmd.add_option("--attributes", in.attributes, "Delimited vertex attribute table with a header row");
  cmd.add_option("--delimiter", in.delimiter, "Attribute table delimiter")->capture_default_str();
  cmd.add_option("--id-column", in.id_column, "Vertex id column of the attribute table (default: first)");
  cmd.add_flag("--directed", in.directed, "Treat edges as arcs");
  cmd.add_flag("--self-loops", in.self_loops, "Allow self-loops (directed graphs only)");
}

void add_model_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--prior", cfg.prior, "degree | density[:p] | blocks:attr[,attr][+degree]")->capture_default_str();
  cmd.add_option("--model", cfg.model_path, "Fitted model file (overrides --prior)");
  cmd.add_option("--tol", cfg.fit.tol, "Fit tolerance on constraint residuals")->capture_default_str();
  cmd.add_option("--max-iter", cfg.fit.max_iter, "Fit iteration budget")->capture_default_str();
}

void add_search_options(CLI::App& cmd, RunConfig& cfg) {
  auto& s = cfg.search;
  cmd.add_option("--width", s.beam_width, "Beam width of the single-subgroup search")->capture_default_str();
  cmd.add_option("--x1", s.x1, "Minimum number of distinct W1 in the outer beam")->capture_default_str();
  cmd.add_option("--x2", s.x2, "Inner beam width")->capture_default_str();
  cmd.add_option("--depth", s.depth, "Maximum selectors per description")->capture_default_str();
  cmd.add_flag("--shared-attr", s.require_shared_attribute,
               "W1 and W2 must constrain a common attribute with different values");
  cmd.add_flag("--disjoint", s.require_disjoint_extensions, "W1 and W2 extensions must not overlap");
  cmd.add_option("--min-size", s.min_extension_size, "Smallest extension considered")->capture_default_str();
  cmd.add_option("--alpha", s.constants.alpha, "Description length cost per selector")->capture_default_str();
  cmd.add_option("--beta", s.constants.beta, "Description length constant")->capture_default_str();
  const std::map<std::string, PairCounting> counting{{"ordered", PairCounting::ordered},
                                                     {"unordered", PairCounting::unordered}};
  cmd.add_option("--single-counting", s.constants.single_counting, "Pair counting of single-subgroup patterns")
      ->transform(CLI::CheckedTransformer(counting))
      ->default_str("ordered");
  cmd.add_option("--bi-counting", s.constants.bi_counting, "Pair counting of bi-subgroup patterns")
      ->transform(CLI::CheckedTransformer(counting))
      ->default_str("unordered");
  cmd.add_option("--bins", cfg.numeric_bins, "Quantile bins per numeric attribute")->capture_default_str();
  cmd.add_option("--threads", s.threads, "Scoring threads (0 = all cores)")
      ->envname("SIGRAPH_THREADS")
      ->capture_default_str();
}

void add_output_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("-o,--output", cfg.output, "Output file (default: standard output)");
  cmd.add_flag("--table", cfg.table, "Aligned table instead of JSON lines");
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subjectively interesting subgroup patterns in attributed graphs"};
  app.set_config("--config", "", "Configuration file of key=value lines (flags take precedence)");
  app.require_subcommand(1);

  RunConfig cfg;

  auto* fit = app.add_subcommand("fit", "Fit a background model and write it to a file");
  add_input_options(*fit, cfg.input);
  add_model_options(*fit, cfg);
  fit->add_option("-o,--output", cfg.output, "Model file (default: standard output)");

  auto* mine = app.add_subcommand("mine", "Mine subjectively interesting patterns");
  add_input_options(*mine, cfg.input);
  add_model_options(*mine, cfg);
  add_search_options(*mine, cfg);
  add_output_options(*mine, cfg);
  mine->add_option("--mode", cfg.mode, "single | bi | iterate:<rounds>")->capture_default_str();
  mine->add_option("--absorb", cfg.absorb, "Patterns absorbed per iteration")->capture_default_str();
  mine->add_option("--top", cfg.top, "Patterns reported per search (0 = all)")->capture_default_str();
  mine->add_flag("--progress", cfg.progress, "Report search progress on standard error");

  auto* baselines = app.add_subcommand("baselines", "Rank single subgroups by objective measures");
  add_input_options(*baselines, cfg.input);
  add_model_options(*baselines, cfg);
  add_search_options(*baselines, cfg);
  add_output_options(*baselines, cfg);
  baselines->add_option("--measure", cfg.measures, "Measures to run (default: all)");
  baselines->add_option("--edge-surplus-alpha", cfg.search.baseline.edge_surplus_alpha, "Edge surplus alpha")
      ->capture_default_str();
  baselines->add_option("--top", cfg.top, "Patterns reported per measure (default 4)");

  SynthParams synth;
  std::string prefix;
  std::vector<std::string> blocks;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a graph with planted attribute-labelled blocks");
  synth_cmd->add_option("--n", synth.n, "Vertices")->capture_default_str();
  synth_cmd->add_option("--density", synth.background_density, "Background edge density")->capture_default_str();
  synth_cmd->add_option("--group-size", synth.group_size, "Vertices per value of 'group'")->capture_default_str();
  synth_cmd->add_option("--flags", synth.flags, "Binary noise attributes")->capture_default_str();
  synth_cmd->add_option("--tags", synth.tags, "Pairing attributes")->capture_default_str();
  synth_cmd->add_flag("!--no-score", synth.score, "Omit the numeric 'score' attribute");
  synth_cmd->add_option("--block", blocks, "Planted block attr=value:attr=value:density (repeatable)");
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("-o,--output", prefix, "Output prefix")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time the search for growing selector counts");
  bench_cmd->add_option("--edges", cfg.input.edges, "Edge list (default: a synthetic graph)");
  bench_cmd->add_option("--attributes", cfg.input.attributes, "Attribute table");
  bench_cmd->add_option("--delimiter", cfg.input.delimiter, "Attribute table delimiter");
  bench_cmd->add_flag("--directed", cfg.input.directed, "Treat edges as arcs");
  add_model_options(*bench_cmd, cfg);
  add_search_options(*bench_cmd, cfg);
  add_output_options(*bench_cmd, cfg);
  bench_cmd->add_option("--mode", cfg.mode, "single | bi")->capture_default_str();
  bench_cmd->add_option("--schedule", bench.schedule, "Selector counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats, "Repeats per count (fastest is reported)")->capture_default_str();
  bench_cmd->add_option("--synth-n", bench.synth.n, "Vertices of the synthetic graph")->default_val(1000);
  bench_cmd->add_option("--synth-flags", bench.synth.flags, "Binary attributes of the synthetic graph")
      ->default_val(200);
  bench_cmd->add_option("--synth-density", bench.synth.background_density, "Density of the synthetic graph")
      ->default_val(0.01);
  bench_cmd->add_option("--seed", bench.synth.seed, "Seed of the synthetic graph")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*fit) return cmd_fit(cfg, out, err);
    if (*mine) return cmd_mine(cfg, out, err);
    if (*baselines) return cmd_baselines(cfg, out, err);
    if (*synth_cmd) {
      for (const auto& b : blocks) synth.blocks.push_back(parse_planted_block(b));
      return cmd_synth(synth, prefix, out, err);
    }
    if (*bench_cmd) {
      bench.synth.group_size = bench.synth.n;
      bench.synth.score = false;
      return cmd_bench(cfg, bench, out, err);
    }
  } catch (const FitError& e) {
    err << "fit failed: " << e.what() << '\n';
    return kFitFailure;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace sigraph::tools
