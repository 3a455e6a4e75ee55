#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "censbo/error.hpp"
#include "commands.hpp"

namespace {

using censbo::cli::read_file;
using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw censbo::IoError("config '" + path + "': " + e.what());
  }
}

std::vector<double> parse_slacks(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const auto& s : raw) out.push_back(censbo::cli::parse_slack(json(s)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization under right-censored observations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir, label, problem, scenario, strategy, trace, model;
  std::vector<std::string> slacks, strategies, problems;
  std::optional<std::size_t> reps, num_trees, max_evaluations, init_size, n_train, n_test, grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget, kappa_max;

  auto* optimize = app.add_subcommand("optimize", "Run censoring-aware BO for each slack and seed");
  optimize->add_option("--config", config_path, "JSON config file");
  optimize->add_option("--problem", problem, "Problem name");
  optimize->add_option("--scenario", scenario, "AC scenario spec (JSON)");
  optimize->add_option("--slacks", slacks, "Slack factors (number or inf)");
  optimize->add_option("--reps", reps);
  optimize->add_option("--seed", seed);
  optimize->add_option("--budget", budget, "Cumulative cost budget per run");
  optimize->add_option("--max-evaluations", max_evaluations);
  optimize->add_option("--kappa-max", kappa_max);
  optimize->add_option("--init-size", init_size);
  optimize->add_option("--trees", num_trees);
  optimize->add_option("--strategy", strategy);
  optimize->add_option("--outdir", outdir);
  optimize->add_option("--label", label);

  auto* bench = app.add_subcommand("benchmark-model", "Compare censored-data strategies");
  bench->add_option("--config", config_path, "JSON config file");
  bench->add_option("--problem", problem);
  bench->add_option("--scenario", scenario, "AC scenario spec (JSON)");
  bench->add_option("--strategies", strategies);
  bench->add_option("--slacks", slacks);
  bench->add_option("--reps", reps);
  bench->add_option("--n-train", n_train);
  bench->add_option("--n-test", n_test);
  bench->add_option("--trees", num_trees);
  bench->add_option("--seed", seed);
  bench->add_option("--outdir", outdir);
  bench->add_option("--label", label);

  auto* plot = app.add_subcommand("plot-data", "Emit model/EI/true-f grid for a 1-D problem");
  plot->add_option("--config", config_path, "JSON config file");
  plot->add_option("--problem", problem);
  plot->add_option("--trace", trace, "Trace JSONL to refit from");
  plot->add_option("--model", model, "Forest JSON to plot instead of refitting");
  plot->add_option("--grid", grid);
  plot->add_option("--trees", num_trees);
  plot->add_option("--seed", seed);
  plot->add_option("--outdir", outdir);
  plot->add_option("--label", label);

  std::size_t pairs = 1000;
  std::uint64_t check_seed = 1;
  std::string check_out;
  auto* check = app.add_subcommand("check-monotonic", "Count cost-monotonicity violations");
  check->add_option("--problems", problems, "Problem names, or 'all'");
  check->add_option("--pairs", pairs);
  check->add_option("--seed", check_seed);
  check->add_option("--out", check_out, "Output CSV (default stdout)");

  censbo::cli::FitConfig fit_cfg;
  auto* fit = app.add_subcommand("fit", "Fit a forest from a CSV of theta..., y, censored");
  fit->add_option("--data", fit_cfg.data)->required();
  fit->add_option("--space", fit_cfg.space, "Configuration space JSON (default unit cube)");
  fit->add_option("--out", fit_cfg.out);
  fit->add_option("--transform", fit_cfg.transform, "identity or log10");
  fit->add_option("--strategy", strategy);
  fit->add_option("--trees", fit_cfg.num_trees);
  fit->add_option("--kappa-max", fit_cfg.kappa_max);
  fit->add_option("--seed", fit_cfg.seed);

  std::string query, predictions = "predictions.csv";
  auto* predict = app.add_subcommand("predict", "Predict a query CSV with a forest JSON");
  predict->add_option("--model", model)->required();
  predict->add_option("--query", query)->required();
  predict->add_option("--out", predictions);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::size_t threads = censbo::cli::threads_from_env();
    if (optimize->parsed()) {
      auto c = censbo::cli::optimize_config_from_json(load_config(config_path));
      if (!problem.empty()) c.problem = problem;
      if (!scenario.empty()) c.scenario = scenario;
      if (!slacks.empty()) c.slacks = parse_slacks(slacks);
      if (reps) c.reps = *reps;
      if (seed) c.seed = *seed;
      if (budget) c.budget = *budget;
      if (max_evaluations) c.max_evaluations = *max_evaluations;
      if (kappa_max) c.kappa_max = *kappa_max;
      if (init_size) c.init_size = *init_size;
      if (num_trees) c.num_trees = *num_trees;
      if (!strategy.empty()) c.strategy = censbo::parse_strategy(strategy);
      if (!outdir.empty()) c.outdir = outdir;
      if (!label.empty()) c.label = label;
      c.threads = threads;
      std::cout << censbo::cli::cmd_optimize(c).string() << '\n';
    } else if (bench->parsed()) {
      auto c = censbo::cli::benchmark_config_from_json(load_config(config_path));
      if (!problem.empty()) c.problem = problem;
      if (!scenario.empty()) c.scenario = scenario;
      if (!strategies.empty()) {
        c.strategies.clear();
        for (const auto& s : strategies) c.strategies.push_back(censbo::parse_strategy(s));
      }
      if (!slacks.empty()) c.slacks = parse_slacks(slacks);
      if (reps) c.reps = *reps;
      if (n_train) c.n_train = *n_train;
      if (n_test) c.n_test = *n_test;
      if (num_trees) c.num_trees = *num_trees;
      if (seed) c.seed = *seed;
      if (!outdir.empty()) c.outdir = outdir;
      if (!label.empty()) c.label = label;
      c.threads = threads;
      std::cout << censbo::cli::cmd_benchmark_model(c).string() << '\n';
    } else if (plot->parsed()) {
      auto c = censbo::cli::plot_config_from_json(load_config(config_path));
      if (!problem.empty()) c.problem = problem;
      if (!trace.empty()) c.trace = trace;
      if (!model.empty()) c.model = model;
      if (grid) c.grid = *grid;
      if (num_trees) c.num_trees = *num_trees;
      if (seed) c.seed = *seed;
      if (!outdir.empty()) c.outdir = outdir;
      if (!label.empty()) c.label = label;
      c.threads = threads;
      std::cout << censbo::cli::cmd_plot_data(c).string() << '\n';
    } else if (check->parsed()) {
      if (check_out.empty()) {
        censbo::cli::cmd_check_monotonic(problems, pairs, check_seed, std::cout);
      } else {
        std::ofstream out(check_out);
        if (!out) throw censbo::IoError("cannot write '" + check_out + "'");
        censbo::cli::cmd_check_monotonic(problems, pairs, check_seed, out);
      }
    } else if (fit->parsed()) {
      if (!strategy.empty()) fit_cfg.strategy = censbo::parse_strategy(strategy);
      fit_cfg.threads = threads;
      censbo::cli::cmd_fit(fit_cfg);
    } else if (predict->parsed()) {
      censbo::cli::cmd_predict(model, query, predictions);
    }
  } catch (const std::exception& e) {
    std::cerr << "censbo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
