#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "censbo/bo_loop.hpp"
#include "censbo/censored_fit.hpp"
#include "censbo/problems.hpp"

namespace censbo::cli {

/// Slack factors as printed in file names and CSV cells: "1.3", "inf".
std::string slack_label(double slack);
/// Accepts a number >= 1 or one of "inf", "none".
double parse_slack(const nlohmann::json& value);

/// Reads CENSBO_THREADS (unset -> 1, 0 -> all cores); throws DomainError on junk.
std::size_t threads_from_env();

/// A problem from the registry, or an AC scenario when scenario_path is set.
std::unique_ptr<Problem> load_problem(const std::string& name,
                                      const std::optional<std::string>& scenario_path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

struct OptimizeConfig {
  std::string problem = "synthetic-1d";
  std::optional<std::string> scenario;
  std::vector<double> slacks{1.3, kNoCensoring};
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  double budget = 300.0;
  std::optional<std::size_t> max_evaluations;
  double kappa_max = 10000.0;
  std::optional<std::size_t> init_size;
  std::size_t num_trees = 100;
  CensoringStrategy strategy = CensoringStrategy::SamplingSchmeeHahn;
  std::size_t max_em_iterations = 10;
  std::size_t candidates = 2000;
  std::size_t local_starts = 10;
  std::size_t random_interleave = 4;
  std::size_t threads = 1;
  std::string outdir = "runs";
  std::string label = "default";

  void validate() const;
};

struct OptimizeRun {
  double slack = 0.0;
  std::size_t rep = 0;
  RunTrace trace;
};

struct BenchmarkModelConfig {
  std::string problem = "ac-default";
  std::optional<std::string> scenario;
  std::vector<CensoringStrategy> strategies{
      CensoringStrategy::SamplingSchmeeHahn, CensoringStrategy::SchmeeHahnMean,
      CensoringStrategy::DropCensored, CensoringStrategy::TreatAsUncensored};
  std::vector<double> slacks{1.0, 1.1, 1.3, 1.5, 2.0, kNoCensoring};
  std::size_t reps = 20;
  std::size_t n_train = 300;
  std::size_t n_test = 200;
  std::size_t num_trees = 100;
  /// Censoring reference: this quantile of the training configurations' true
  /// values; kappa = min(slack * reference, kappa_max).
  double reference_quantile = 0.5;
  double kappa_max = 10000.0;
  std::size_t max_em_iterations = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string outdir = "runs";
  std::string label = "default";

  void validate() const;
};

struct BenchmarkRow {
  CensoringStrategy strategy{};
  double slack = 0.0;
  std::size_t rep = 0;
  double rmse = 0.0;
  double loglik = 0.0;
  double censored_fraction = 0.0;
};

struct PlotDataConfig {
  std::string problem = "synthetic-1d";
  std::optional<std::string> trace;
  std::optional<std::string> model;
  std::size_t grid = 200;
  std::size_t num_trees = 1000;
  double kappa_max = 10000.0;
  CensoringStrategy strategy = CensoringStrategy::SamplingSchmeeHahn;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string outdir = "runs";
  std::string label = "default";

  void validate() const;
};

struct FitConfig {
  std::string data;
  std::optional<std::string> space;
  std::string out = "forest.json";
  std::string transform = "identity";
  CensoringStrategy strategy = CensoringStrategy::SamplingSchmeeHahn;
  std::size_t num_trees = 100;
  double kappa_max = 10000.0;
  std::size_t max_em_iterations = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

OptimizeConfig optimize_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OptimizeConfig& c);
BenchmarkModelConfig benchmark_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BenchmarkModelConfig& c);
PlotDataConfig plot_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PlotDataConfig& c);

/// Runs every (slack, rep) pair and returns the traces in slack-major order.
std::vector<OptimizeRun> run_optimize(const OptimizeConfig& config);
/// run_optimize plus output files under <outdir>/optimize/<label>/: config.json,
/// traces/<slack>_<rep>.jsonl and .csv, summary.csv, curves.csv.
std::filesystem::path cmd_optimize(const OptimizeConfig& config);

/// Rows ordered by strategy, then slack, then rep.
std::vector<BenchmarkRow> run_benchmark_model(const BenchmarkModelConfig& config);
/// Writes config.json, results.csv and summary.csv under
/// <outdir>/benchmark-model/<label>/.
std::filesystem::path cmd_benchmark_model(const BenchmarkModelConfig& config);

/// Writes config.json and plot.csv under <outdir>/plot-data/<label>/. The
/// model columns and true_f share the model's response scale.
std::filesystem::path cmd_plot_data(const PlotDataConfig& config);

/// Writes problem,pairs,ties,violations rows; returns the total violation count.
std::size_t cmd_check_monotonic(const std::vector<std::string>& problems, std::size_t pairs,
                                std::uint64_t seed, std::ostream& out);

/// Fits from a CSV with header theta_0..theta_{d-1},y,censored and writes a
/// forest JSON document.
void cmd_fit(const FitConfig& config);

/// Predicts the query CSV (header theta_0..theta_{d-1}) with a forest JSON
/// document; output columns theta..., mu, var in the model's response scale.
void cmd_predict(const std::string& model_path, const std::string& query_path,
                 const std::string& out_path);

}  // namespace censbo::cli
