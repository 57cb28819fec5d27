#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "sigraph/description.hpp"
#include "sigraph/interestingness.hpp"
#include "sigraph_tools/app.hpp"
#include "sigraph_tools/commands.hpp"
#include "sigraph_tools/report.hpp"

using namespace sigraph;
using namespace sigraph::testing;
using namespace sigraph::tools;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sigraph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_app(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small synthetic dataset written through the CLI.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto r = run({"synth", "--n", "160", "--group-size", "40", "--density", "0.03", "--block",
                        "group=0:group=1:0.4", "--seed", "2", "-o", dir.file("g").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    edges = dir.file("g.edges").string();
    attrs = dir.file("g.attrs.csv").string();
  }
  std::vector<std::string> input() const { return {"--edges", edges, "--attributes", attrs}; }
  std::vector<std::string> with_input(std::vector<std::string> head, std::vector<std::string> tail = {}) const {
    auto in = input();
    head.insert(head.end(), in.begin(), in.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  TempDir dir;
  std::string edges, attrs;
};

}  // namespace

TEST(PriorSpecParsing, Forms) {
  EXPECT_EQ(parse_prior_spec("degree").kind, PriorKind::degree);
  const auto d = parse_prior_spec("density:0.01");
  EXPECT_EQ(d.kind, PriorKind::density);
  EXPECT_EQ(d.density, 0.01);
  EXPECT_FALSE(parse_prior_spec("density").density);
  const auto b = parse_prior_spec("blocks:year,dorm+degree");
  EXPECT_EQ(b.partitions, (std::vector<std::string>{"year", "dorm"}));
  EXPECT_TRUE(b.with_degrees);
  EXPECT_THROW(parse_prior_spec("density:2"), InputError);
  EXPECT_THROW(parse_prior_spec("blocks:"), InputError);
  EXPECT_THROW(parse_prior_spec("uniform"), InputError);
}

TEST(ModeParsing, Forms) {
  EXPECT_EQ(parse_mode("bi").mode, Mode::bi);
  EXPECT_EQ(parse_mode("iterate:4").rounds, 4);
  EXPECT_THROW(parse_mode("iterate:0"), InputError);
  EXPECT_THROW(parse_mode("iterate:1.5"), InputError);
  EXPECT_THROW(parse_mode("triple"), InputError);
}

TEST_F(CliTest, SynthManifest) {
  const auto manifest = slurp(dir.file("g.manifest.json"));
  EXPECT_NE(manifest.find("\"w1\": \"group=0\""), std::string::npos);
  EXPECT_NE(manifest.find("\"w2\": \"group=1\""), std::string::npos);
}

TEST_F(CliTest, FitRegularGraphResiduals) {
  const auto g = regular(30, 4);
  const auto e = dir.file("r.edges"), a = dir.file("r.csv");
  write_graph(g, e, a);
  const auto r = run({"fit", "--edges", e.string(), "--attributes", a.string(), "-o", dir.file("r.model").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_LE(report["max_degree_residual"].get<double>(), 1e-4);
}

TEST_F(CliTest, FitDensityModelIsUniform) {
  const auto r = run(with_input({"fit", "--prior", "density:0.01"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = BackgroundModel::deserialize(r.out);
  EXPECT_NEAR(m.edge_probability(0, 1), 0.01, 1e-15);
  EXPECT_NEAR(m.edge_probability(17, 93), 0.01, 1e-15);
}

TEST_F(CliTest, ReportRoundTripRescoring) {
  const auto r = run(with_input({"mine", "--mode", "bi", "--x1", "3", "--x2", "2"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = load_graph(edges, attrs);
  const auto model = fit_degree_prior(g);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    const auto line = parse_report_line(row);
    const auto w1 = parse_description(line.w1, g);
    ASSERT_TRUE(line.w2);
    const auto w2 = parse_description(*line.w2, g);
    const auto p = evaluate_pattern(g, model, w1, w2, ScoreConstants{});
    EXPECT_NEAR(p.si, line.si, 1e-9);
    EXPECT_EQ(p.k_w, line.k_w);
    EXPECT_EQ(p.n_w, line.n_w);
    EXPECT_EQ(line.convention, "unordered");
  }
  const auto top = parse_report_line(rows[0]);
  EXPECT_TRUE((top.w1 == "group=0" && top.w2 == "group=1") || (top.w1 == "group=1" && top.w2 == "group=0"));
}

TEST_F(CliTest, SingleModeReportsOrderedConvention) {
  const auto r = run(with_input({"mine", "--mode", "single", "--top", "3"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  const auto g = load_graph(edges, attrs);
  const auto model = fit_degree_prior(g);
  for (const auto& row : rows) {
    const auto line = parse_report_line(row);
    EXPECT_FALSE(line.w2);
    EXPECT_EQ(line.convention, "ordered");
    EXPECT_NEAR(evaluate_pattern(g, model, parse_description(line.w1, g), std::nullopt, ScoreConstants{}).si, line.si,
                1e-9);
  }
}

TEST_F(CliTest, ByteIdenticalOutputAndThreads) {
  const auto a = run(with_input({"mine", "--mode", "bi", "--x1", "3", "--x2", "2"}));
  const auto b = run(with_input({"mine", "--mode", "bi", "--x1", "3", "--x2", "2", "--threads", "3"}));
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SavedModelGivesSameResult) {
  const auto model = dir.file("m.json").string();
  ASSERT_EQ(run(with_input({"fit", "-o", model})).code, 0);
  const auto a = run(with_input({"mine", "--top", "5"}));
  const auto b = run(with_input({"mine", "--top", "5", "--model", model}));
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, IterateRecordsRounds) {
  const auto r = run(with_input({"mine", "--mode", "iterate:2", "--x1", "2", "--x2", "2", "--top", "1"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(parse_report_line(rows[0]).round, 1);
  EXPECT_EQ(parse_report_line(rows[1]).round, 2);
  EXPECT_NE(parse_report_line(rows[0]).w1 + *parse_report_line(rows[0]).w2,
            parse_report_line(rows[1]).w1 + *parse_report_line(rows[1]).w2);
}

TEST_F(CliTest, OutputFileAndTable) {
  const auto file = dir.file("out.jsonl");
  const auto r = run(with_input({"mine", "--top", "2", "-o", file.string()}));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(lines(slurp(file)).size(), 2u);
  const auto t = run(with_input({"mine", "--top", "2", "--table"}));
  ASSERT_EQ(t.code, 0);
  const auto rows = lines(t.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("Rank", 0), 0u);
  EXPECT_EQ(rows[0].find("W2"), std::string::npos);
}

TEST_F(CliTest, Baselines) {
  const auto r =
      run(with_input({"baselines", "--measure", "edge_density", "--measure", "inv_conductance", "--top", "3"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto line = parse_report_line(rows[i]);
    EXPECT_EQ(line.measure, "edge_density");
    ASSERT_TRUE(line.score);
    EXPECT_NEAR(*line.score, 2.0 * line.k_w / (line.size1 * (line.size1 - 1.0)), 1e-12);
    if (i > 0) EXPECT_GE(*parse_report_line(rows[i - 1]).score, *line.score);
  }
  EXPECT_EQ(parse_report_line(rows[3]).measure, "inv_conductance");
}

TEST_F(CliTest, ConfigFile) {
  const auto config = dir.write("run.ini", "[mine]\nmode=bi\nx1=2\nx2=2\n");
  const auto a = run(with_input({"--config", config, "mine"}));
  const auto b = run(with_input({"mine", "--mode", "bi", "--x1", "2", "--x2", "2"}));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, kOk);
  EXPECT_EQ(run({}).code, kInputError);
  EXPECT_EQ(run({"mine", "--edges", dir.file("missing").string()}).code, kInputError);
  EXPECT_EQ(run(with_input({"mine", "--prior", "uniform"})).code, kInputError);
  EXPECT_EQ(run(with_input({"mine", "--mode", "quad"})).code, kInputError);
  EXPECT_EQ(run(with_input({"mine", "--depth", "0"})).code, kInputError);
  EXPECT_EQ(run(with_input({"mine", "--bogus"})).code, kInputError);
  EXPECT_EQ(run(with_input({"fit", "--max-iter", "1", "--tol", "1e-14"})).code, kFitFailure);

  const AttributedGraph unique(4, {{0, 1}, {2, 3}}, false, {nominal_column("id2", {"a", "b", "c", "d"})});
  write_graph(unique, dir.file("u.edges"), dir.file("u.csv"));
  const auto empty = run({"mine", "--edges", dir.file("u.edges").string(), "--attributes", dir.file("u.csv").string()});
  EXPECT_EQ(empty.code, kEmptyResult);
  EXPECT_FALSE(empty.err.empty());
}

TEST_F(CliTest, BenchRows) {
  const auto r = run(with_input({"bench", "--schedule", "4,8", "--repeats", "1", "--width", "5", "--depth", "1"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(nlohmann::json::parse(rows[0])["ratio"].is_null());
  EXPECT_TRUE(nlohmann::json::parse(rows[1])["ratio"].is_number());
  EXPECT_EQ(run(with_input({"bench", "--schedule", "4,100000"})).code, kInputError);
}
