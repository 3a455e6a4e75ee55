#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "censbo/error.hpp"
#include "censbo/trace_io.hpp"
#include "csv.hpp"

namespace censbo::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / ("censbo_cli_" + std::string(info->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  OptimizeConfig small_optimize() const {
    OptimizeConfig c;
    c.problem = "bowl-1d";
    c.reps = 2;
    c.budget = 8.0;
    c.num_trees = 20;
    c.candidates = 200;
    c.local_starts = 2;
    c.outdir = dir.string();
    c.label = "small";
    return c;
  }

  fs::path dir;
};

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t lines_of_string(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CENSBO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Slack, LabelsAndParsing) {
  EXPECT_EQ(slack_label(1.3), "1.3");
  EXPECT_EQ(slack_label(kNoCensoring), "inf");
  EXPECT_EQ(parse_slack(nlohmann::json("inf")), kNoCensoring);
  EXPECT_EQ(parse_slack(nlohmann::json("none")), kNoCensoring);
  EXPECT_EQ(parse_slack(nlohmann::json(2)), 2.0);
  EXPECT_THROW(parse_slack(nlohmann::json("fast")), DomainError);
}

TEST(Threads, EnvironmentVariable) {
  ::unsetenv("CENSBO_THREADS");
  EXPECT_EQ(threads_from_env(), 1u);
  ::setenv("CENSBO_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(), 3u);
  ::setenv("CENSBO_THREADS", "many", 1);
  EXPECT_THROW(threads_from_env(), DomainError);
  ::unsetenv("CENSBO_THREADS");
}

TEST(ConfigJson, OptimizeRoundTrip) {
  OptimizeConfig c;
  c.slacks = {1.0, 2.5, kNoCensoring};
  c.max_evaluations = 40;
  c.scenario = "x.json";
  const auto back = optimize_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.slacks, c.slacks);
  EXPECT_THROW(optimize_config_from_json(nlohmann::json{{"reps", 0}}).validate(), DomainError);
  EXPECT_THROW(optimize_config_from_json(nlohmann::json::parse(R"({"slacks": [0.5]})")), DomainError);
  EXPECT_THROW(optimize_config_from_json(nlohmann::json{{"reps", "two"}}), DomainError);
}

TEST_F(CliTest, OptimizeWritesOneTracePerSlackAndRep) {
  const auto out = cmd_optimize(small_optimize());
  std::size_t jsonl = 0;
  std::size_t csv = 0;
  for (const auto& e : fs::directory_iterator(out / "traces")) {
    jsonl += e.path().extension() == ".jsonl" ? 1 : 0;
    csv += e.path().extension() == ".csv" ? 1 : 0;
  }
  EXPECT_EQ(jsonl, 4u);
  EXPECT_EQ(csv, 4u);
  EXPECT_TRUE(fs::exists(out / "config.json"));
  EXPECT_TRUE(fs::exists(out / "curves.csv"));

  const auto table = parse_numeric_csv(read_file(out / "summary.csv"), "summary.csv");
  ASSERT_EQ(table.rows.size(), 4u);
  for (const auto& row : table.rows) {
    const std::string slack = row[0] == kNoCensoring ? "inf" : slack_label(row[0]);
    std::ifstream in(out / "traces" / (slack + "_" + std::to_string(static_cast<int>(row[1])) + ".jsonl"));
    const auto trace = read_trace_jsonl(in);
    ASSERT_TRUE(trace.final_f_min);
    EXPECT_EQ(row[2], *trace.final_f_min);
    EXPECT_EQ(row[4], static_cast<double>(trace.records.size()));
  }
}

TEST_F(CliTest, OptimizeIsByteDeterministic) {
  auto c = small_optimize();
  const auto first = cmd_optimize(c);
  const std::string a = read_file(first / "traces" / "1.3_0.jsonl");
  c.label = "again";
  const auto second = cmd_optimize(c);
  EXPECT_EQ(read_file(second / "traces" / "1.3_0.jsonl"), a);
  EXPECT_EQ(read_file(second / "summary.csv"), read_file(first / "summary.csv"));
}

TEST_F(CliTest, BenchmarkRowCount) {
  BenchmarkModelConfig c;
  c.problem = "log-sphere-3d";
  c.strategies = {CensoringStrategy::SamplingSchmeeHahn, CensoringStrategy::DropCensored};
  c.slacks = {1.0, kNoCensoring};
  c.reps = 3;
  c.n_train = 30;
  c.n_test = 20;
  c.num_trees = 10;
  c.outdir = dir.string();
  const auto rows = run_benchmark_model(c);
  EXPECT_EQ(rows.size(), 2u * 2u * 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].strategy, c.strategies[i / 6]);
    EXPECT_EQ(rows[i].slack, c.slacks[(i / 3) % 2]);
    EXPECT_EQ(rows[i].rep, i % 3);
    if (rows[i].slack == kNoCensoring) {
      EXPECT_EQ(rows[i].censored_fraction, 0.0);
    }
  }
  // without censoring the strategies coincide
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(rows[3 + r].rmse, rows[9 + r].rmse);
  const auto out = cmd_benchmark_model(c);
  EXPECT_EQ(lines_of(out / "results.csv").size(), 1u + rows.size());
  EXPECT_EQ(lines_of(out / "summary.csv").size(), 1u + 4u);
}

TEST_F(CliTest, PlotDataFromTrace) {
  const auto opt = cmd_optimize(small_optimize());
  PlotDataConfig c;
  c.problem = "bowl-1d";
  c.trace = (opt / "traces" / "1.3_0.jsonl").string();
  c.grid = 200;
  c.num_trees = 30;
  c.outdir = dir.string();
  const auto out = cmd_plot_data(c);
  const auto text = read_file(out / "plot.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,theta,mu,mu_minus_2sd,mu_plus_2sd,ei_scaled,true_f,y,censored");
  std::size_t grid_rows = 0;
  std::size_t obs_rows = 0;
  while (std::getline(in, line)) {
    const auto kind = line.substr(0, line.find(','));
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (kind == "grid") {
      ++grid_rows;
      const double mu = std::stod(cells[2]);
      EXPECT_LE(std::stod(cells[3]), mu);
      EXPECT_GE(std::stod(cells[4]), mu);
      const double ei = std::stod(cells[5]);
      EXPECT_GE(ei, 0.0);
      EXPECT_LE(ei, 1.0);
    } else {
      ++obs_rows;
    }
  }
  std::ifstream trace_in(*c.trace);
  EXPECT_EQ(grid_rows, 200u);
  EXPECT_EQ(obs_rows, read_trace_jsonl(trace_in).records.size());
}

TEST_F(CliTest, PlotDataRejectsMultiDimensionalProblems) {
  PlotDataConfig c;
  c.problem = "log-sphere-3d";
  c.trace = "unused.jsonl";
  c.outdir = dir.string();
  EXPECT_THROW(cmd_plot_data(c), DomainError);
}

TEST_F(CliTest, FitThenPredict) {
  write_file(dir / "data.csv",
             "theta_0,y,censored\n0.1,1,0\n0.2,1.2,0\n0.5,4,1\n0.8,3,0\n0.9,3.3,0\n");
  write_file(dir / "query.csv", "theta_0\n0.15\n0.85\n");
  FitConfig fc;
  fc.data = (dir / "data.csv").string();
  fc.out = (dir / "forest.json").string();
  fc.num_trees = 20;
  cmd_fit(fc);
  cmd_predict(fc.out, (dir / "query.csv").string(), (dir / "pred.csv").string());
  const auto table = parse_numeric_csv(read_file(dir / "pred.csv"), "pred.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"theta_0", "mu", "var"}));
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_LT(table.rows[0][1], 2.0);
  EXPECT_GT(table.rows[1][1], 2.0);
  EXPECT_GE(table.rows[0][2], 0.0);

  write_file(dir / "bad.csv", "theta_0,y,censored\n0.1,oops,0\n");
  fc.data = (dir / "bad.csv").string();
  EXPECT_THROW(cmd_fit(fc), IoError);
}

TEST_F(CliTest, CheckMonotonicReportsFixtureOnly) {
  std::ostringstream shipped;
  EXPECT_EQ(cmd_check_monotonic({"all"}, 200, 1, shipped), 0u);
  EXPECT_EQ(lines_of_string(shipped.str()), 1u + shipped_problem_names().size());
  std::ostringstream fixture;
  EXPECT_GT(cmd_check_monotonic({"negated-cost-fixture"}, 200, 1, fixture), 0u);
}

TEST_F(CliTest, ExecutableExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_NE(run_cli("no-such-command"), 0);
  EXPECT_EQ(run_cli("check-monotonic --pairs 50"), 0);
  EXPECT_NE(run_cli("plot-data --problem log-sphere-3d --trace x.jsonl --outdir " + dir.string()),
            0);
  EXPECT_NE(run_cli("predict --model " + (dir / "missing.json").string() + " --query q.csv"), 0);
}

}  // namespace
}  // namespace censbo::cli
