#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "censbo/error.hpp"
#include "censbo/forest_json.hpp"
#include "censbo/random.hpp"
#include "censbo/trace_io.hpp"
#include "csv.hpp"

namespace censbo::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTrainTag = 0x7A1;
constexpr std::uint64_t kTestTag = 0x7E57;

double to_log(double raw) { return std::log10(std::max(raw, kResponseFloor)); }

json slack_to_json(double s) { return std::isinf(s) ? json("inf") : json(s); }

json slacks_to_json(const std::vector<double>& slacks) {
  json out = json::array();
  for (double s : slacks) out.push_back(slack_to_json(s));
  return out;
}

std::vector<double> slacks_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_slack(v));
  return out;
}

json optional_to_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> optional_string(const json& j, const char* key,
                                           std::optional<std::string> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

void check_slacks(const std::vector<double>& slacks) {
  if (slacks.empty()) throw DomainError("at least one slack factor required");
  for (double s : slacks) {
    if (std::isnan(s) || s < 1.0) throw DomainError("slack factors must be >= 1 or inf");
  }
}

fs::path prepare_dir(const std::string& outdir, const char* command, const std::string& label) {
  if (label.empty()) throw DomainError("label must not be empty");
  fs::path dir = fs::path(outdir) / command / label;
  fs::create_directories(dir);
  return dir;
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::vector<Observation> to_model_scale(const std::vector<Observation>& raw) {
  std::vector<Observation> out = raw;
  for (auto& o : out) o.y = to_log(o.y);
  return out;
}

}  // namespace

std::string slack_label(double slack) { return format_real(slack); }

double parse_slack(const json& value) {
  double v = 0.0;
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf" || s == "none") return kNoCensoring;
    std::size_t used = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw DomainError("invalid slack factor '" + s + "'");
  } else if (value.is_number()) {
    v = value.get<double>();
  } else {
    throw DomainError("slack factor must be a number or \"inf\"");
  }
  if (std::isnan(v) || v < 1.0) throw DomainError("slack factor must be >= 1");
  return v;
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("CENSBO_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  const std::string s(raw);
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw DomainError("CENSBO_THREADS must be a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(std::stoull(s));
}

std::unique_ptr<Problem> load_problem(const std::string& name,
                                      const std::optional<std::string>& scenario_path) {
  if (scenario_path) {
    const auto spec = parse_scenario_spec(read_file(*scenario_path));
    return std::make_unique<ACProblem>(make_ac_scenario(spec),
                                       fs::path(*scenario_path).stem().string());
  }
  if (name == "negated-cost-fixture") return make_negated_cost_fixture();
  return make_problem(name);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void OptimizeConfig::validate() const {
  check_slacks(slacks);
  if (reps < 1) throw DomainError("reps must be >= 1");
  BudgetSpec{budget, max_evaluations}.validate();
  CensoringPolicy{1.0, kappa_max}.validate();
  if (init_size && *init_size < 2) throw DomainError("init_size must be >= 2");
  if (num_trees < 1) throw DomainError("num_trees must be >= 1");
  if (max_em_iterations < 1) throw DomainError("max_em_iterations must be >= 1");
  if (candidates < 1) throw DomainError("candidates must be >= 1");
}

void BenchmarkModelConfig::validate() const {
  check_slacks(slacks);
  if (strategies.empty()) throw DomainError("at least one strategy required");
  if (reps < 1) throw DomainError("reps must be >= 1");
  if (n_train < 2) throw DomainError("n_train must be >= 2");
  if (n_test < 1) throw DomainError("n_test must be >= 1");
  if (num_trees < 1) throw DomainError("num_trees must be >= 1");
  if (!(reference_quantile >= 0.0 && reference_quantile <= 1.0)) {
    throw DomainError("reference_quantile must lie in [0, 1]");
  }
  CensoringPolicy{1.0, kappa_max}.validate();
  if (max_em_iterations < 1) throw DomainError("max_em_iterations must be >= 1");
}

void PlotDataConfig::validate() const {
  if (!trace && !model) throw DomainError("plot-data needs a trace or a model");
  if (grid < 1) throw DomainError("grid must be >= 1");
  if (num_trees < 1) throw DomainError("num_trees must be >= 1");
  CensoringPolicy{1.0, kappa_max}.validate();
}

void FitConfig::validate() const {
  if (data.empty()) throw DomainError("fit needs a data file");
  if (transform != "identity" && transform != "log10") {
    throw DomainError("transform must be 'identity' or 'log10'");
  }
  if (num_trees < 1) throw DomainError("num_trees must be >= 1");
  CensoringPolicy{1.0, kappa_max}.validate();
  if (max_em_iterations < 1) throw DomainError("max_em_iterations must be >= 1");
}

OptimizeConfig optimize_config_from_json(const json& j) {
  OptimizeConfig c;
  try {
    c.problem = j.value("problem", c.problem);
    c.scenario = optional_string(j, "scenario", c.scenario);
    if (j.contains("slacks")) c.slacks = slacks_from_json(j.at("slacks"));
    c.reps = j.value("reps", c.reps);
    c.seed = j.value("seed", c.seed);
    c.budget = j.value("budget", c.budget);
    if (j.contains("max_evaluations") && !j.at("max_evaluations").is_null()) {
      c.max_evaluations = j.at("max_evaluations").get<std::size_t>();
    }
    c.kappa_max = j.value("kappa_max", c.kappa_max);
    if (j.contains("init_size") && !j.at("init_size").is_null()) {
      c.init_size = j.at("init_size").get<std::size_t>();
    }
    c.num_trees = j.value("num_trees", c.num_trees);
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    c.max_em_iterations = j.value("max_em_iterations", c.max_em_iterations);
    c.candidates = j.value("candidates", c.candidates);
    c.local_starts = j.value("local_starts", c.local_starts);
    c.random_interleave = j.value("random_interleave", c.random_interleave);
    c.outdir = j.value("outdir", c.outdir);
    c.label = j.value("label", c.label);
  } catch (const json::exception& e) {
    throw DomainError(std::string("optimize config: ") + e.what());
  }
  return c;
}

json to_json(const OptimizeConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["scenario"] = optional_to_json(c.scenario);
  j["slacks"] = slacks_to_json(c.slacks);
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["max_evaluations"] = c.max_evaluations ? json(*c.max_evaluations) : json(nullptr);
  j["kappa_max"] = c.kappa_max;
  j["init_size"] = c.init_size ? json(*c.init_size) : json(nullptr);
  j["num_trees"] = c.num_trees;
  j["strategy"] = std::string(to_string(c.strategy));
  j["max_em_iterations"] = c.max_em_iterations;
  j["candidates"] = c.candidates;
  j["local_starts"] = c.local_starts;
  j["random_interleave"] = c.random_interleave;
  j["outdir"] = c.outdir;
  j["label"] = c.label;
  return j;
}

BenchmarkModelConfig benchmark_config_from_json(const json& j) {
  BenchmarkModelConfig c;
  try {
    c.problem = j.value("problem", c.problem);
    c.scenario = optional_string(j, "scenario", c.scenario);
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    if (j.contains("slacks")) c.slacks = slacks_from_json(j.at("slacks"));
    c.reps = j.value("reps", c.reps);
    c.n_train = j.value("n_train", c.n_train);
    c.n_test = j.value("n_test", c.n_test);
    c.num_trees = j.value("num_trees", c.num_trees);
    c.reference_quantile = j.value("reference_quantile", c.reference_quantile);
    c.kappa_max = j.value("kappa_max", c.kappa_max);
    c.max_em_iterations = j.value("max_em_iterations", c.max_em_iterations);
    c.seed = j.value("seed", c.seed);
    c.outdir = j.value("outdir", c.outdir);
    c.label = j.value("label", c.label);
  } catch (const json::exception& e) {
    throw DomainError(std::string("benchmark-model config: ") + e.what());
  }
  return c;
}

json to_json(const BenchmarkModelConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["scenario"] = optional_to_json(c.scenario);
  j["strategies"] = json::array();
  for (auto s : c.strategies) j["strategies"].push_back(std::string(to_string(s)));
  j["slacks"] = slacks_to_json(c.slacks);
  j["reps"] = c.reps;
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["num_trees"] = c.num_trees;
  j["reference_quantile"] = c.reference_quantile;
  j["kappa_max"] = c.kappa_max;
  j["max_em_iterations"] = c.max_em_iterations;
  j["seed"] = c.seed;
  j["outdir"] = c.outdir;
  j["label"] = c.label;
  return j;
}

PlotDataConfig plot_config_from_json(const json& j) {
  PlotDataConfig c;
  try {
    c.problem = j.value("problem", c.problem);
    c.trace = optional_string(j, "trace", c.trace);
    c.model = optional_string(j, "model", c.model);
    c.grid = j.value("grid", c.grid);
    c.num_trees = j.value("num_trees", c.num_trees);
    c.kappa_max = j.value("kappa_max", c.kappa_max);
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    c.seed = j.value("seed", c.seed);
    c.outdir = j.value("outdir", c.outdir);
    c.label = j.value("label", c.label);
  } catch (const json::exception& e) {
    throw DomainError(std::string("plot-data config: ") + e.what());
  }
  return c;
}

json to_json(const PlotDataConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["trace"] = optional_to_json(c.trace);
  j["model"] = optional_to_json(c.model);
  j["grid"] = c.grid;
  j["num_trees"] = c.num_trees;
  j["kappa_max"] = c.kappa_max;
  j["strategy"] = std::string(to_string(c.strategy));
  j["seed"] = c.seed;
  j["outdir"] = c.outdir;
  j["label"] = c.label;
  return j;
}

std::vector<OptimizeRun> run_optimize(const OptimizeConfig& config) {
  config.validate();
  const auto problem = load_problem(config.problem, config.scenario);
  ForestConfig forest;
  forest.num_trees = config.num_trees;
  forest.threads = config.threads;
  CensoredFitConfig fit;
  fit.max_iterations = config.max_em_iterations;
  fit.strategy = config.strategy;
  AcquisitionConfig acq;
  acq.num_random_candidates = config.candidates;
  acq.num_local_starts = config.local_starts;
  acq.random_interleave = config.random_interleave;
  const BudgetSpec budget{config.budget, config.max_evaluations};

  std::vector<OptimizeRun> runs;
  for (double slack : config.slacks) {
    const CensoringPolicy policy{slack, config.kappa_max};
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      runs.push_back(OptimizeRun{
          slack, rep,
          optimize(*problem, problem->space(), policy, budget, forest, fit, acq,
                   config.init_size, derive_seed(config.seed, {rep}))});
    }
  }
  return runs;
}

fs::path cmd_optimize(const OptimizeConfig& config) {
  config.validate();
  load_problem(config.problem, config.scenario);
  const fs::path dir = prepare_dir(config.outdir, "optimize", config.label);
  write_file(dir / "config.json", to_json(config).dump(2) + "\n");
  fs::create_directories(dir / "traces");
  const auto runs = run_optimize(config);

  std::ostringstream summary;
  summary << "slack,rep,final_f_min,cumulative_cost,evaluations,censored_evaluations,complete\n";
  std::ostringstream curves;
  curves << "slack,rep,evaluation,cumulative_cost,f_min\n";
  for (const auto& run : runs) {
    const auto& t = run.trace;
    const std::string stem = slack_label(run.slack) + "_" + std::to_string(run.rep);
    std::ostringstream jsonl;
    write_trace_jsonl(jsonl, t);
    write_file(dir / "traces" / (stem + ".jsonl"), jsonl.str());
    std::ostringstream csv;
    const std::size_t dims = t.records.empty() ? 0 : t.records.front().theta.size();
    write_trace_csv(csv, t, dims);
    write_file(dir / "traces" / (stem + ".csv"), csv.str());

    const std::size_t censored =
        std::count_if(t.records.begin(), t.records.end(), [](const auto& r) { return r.censored; });
    const double total = t.records.empty() ? 0.0 : t.records.back().cumulative_cost;
    summary << slack_label(run.slack) << ',' << run.rep << ','
            << (t.final_f_min ? format_real(*t.final_f_min) : "") << ',' << format_real(total)
            << ',' << t.records.size() << ',' << censored << ',' << (t.complete ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const auto& r = t.records[i];
      curves << slack_label(run.slack) << ',' << run.rep << ',' << i << ','
             << format_real(r.cumulative_cost) << ','
             << (r.f_min_after ? format_real(*r.f_min_after) : "") << '\n';
    }
  }
  write_file(dir / "summary.csv", summary.str());
  write_file(dir / "curves.csv", curves.str());
  return dir;
}

std::vector<BenchmarkRow> run_benchmark_model(const BenchmarkModelConfig& config) {
  config.validate();
  const auto problem = load_problem(config.problem, config.scenario);
  const auto& space = problem->space();
  ForestConfig forest;
  forest.num_trees = config.num_trees;
  forest.threads = config.threads;
  CensoredFitConfig fit;
  fit.max_iterations = config.max_em_iterations;
  fit.kappa_max = to_log(config.kappa_max);

  // results[strategy index][slack index][rep]
  std::vector<std::vector<std::vector<BenchmarkRow>>> results(
      config.strategies.size(),
      std::vector<std::vector<BenchmarkRow>>(config.slacks.size(),
                                             std::vector<BenchmarkRow>(config.reps)));
  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    Rng train_rng(derive_seed(config.seed, {kTrainTag, rep}));
    std::vector<Configuration> train(config.n_train);
    std::vector<double> train_truth(config.n_train);
    for (std::size_t i = 0; i < config.n_train; ++i) {
      train[i] = space.sample_uniform(train_rng);
      train_truth[i] = problem->value(train[i], derive_seed(config.seed, {stream::kNoise, rep, i}));
    }
    Rng test_rng(derive_seed(config.seed, {kTestTag, rep}));
    std::vector<LabeledPoint> test(config.n_test);
    for (std::size_t i = 0; i < config.n_test; ++i) {
      test[i].theta = space.sample_uniform(test_rng);
      test[i].value = to_log(
          problem->value(test[i].theta, derive_seed(config.seed, {kTestTag, stream::kNoise, rep, i})));
    }
    const double reference = quantile(train_truth, config.reference_quantile);
    forest.seed = derive_seed(config.seed, {stream::kTree, rep});

    for (std::size_t si = 0; si < config.slacks.size(); ++si) {
      const double kappa = censoring_threshold({config.slacks[si], config.kappa_max}, reference);
      std::vector<Observation> raw;
      raw.reserve(config.n_train);
      std::size_t censored = 0;
      for (std::size_t i = 0; i < config.n_train; ++i) {
        raw.push_back(problem->evaluate_capped(train[i], kappa,
                                               derive_seed(config.seed, {stream::kNoise, rep, i})));
        censored += raw.back().censored ? 1 : 0;
      }
      const auto data = to_model_scale(raw);
      const double var_floor = default_var_floor(data);
      for (std::size_t k = 0; k < config.strategies.size(); ++k) {
        fit.strategy = config.strategies[k];
        const auto model = fit_model(data, space, forest, fit);
        const auto score = evaluate_model(model.forest, test, var_floor);
        results[k][si][rep] = BenchmarkRow{config.strategies[k], config.slacks[si], rep, score.rmse,
                                           score.mean_log_likelihood,
                                           static_cast<double>(censored) /
                                               static_cast<double>(config.n_train)};
      }
    }
  }
  std::vector<BenchmarkRow> rows;
  for (const auto& by_slack : results) {
    for (const auto& by_rep : by_slack) rows.insert(rows.end(), by_rep.begin(), by_rep.end());
  }
  return rows;
}

fs::path cmd_benchmark_model(const BenchmarkModelConfig& config) {
  config.validate();
  load_problem(config.problem, config.scenario);
  const fs::path dir = prepare_dir(config.outdir, "benchmark-model", config.label);
  write_file(dir / "config.json", to_json(config).dump(2) + "\n");
  const auto rows = run_benchmark_model(config);

  std::ostringstream results;
  results << "strategy,slack,rep,rmse,loglik,censored_fraction\n";
  for (const auto& r : rows) {
    results << to_string(r.strategy) << ',' << slack_label(r.slack) << ',' << r.rep << ','
            << format_real(r.rmse) << ',' << format_real(r.loglik) << ','
            << format_real(r.censored_fraction) << '\n';
  }
  write_file(dir / "results.csv", results.str());

  std::ostringstream summary;
  summary << "strategy,slack,median_rmse,median_loglik,median_censored_fraction\n";
  for (std::size_t begin = 0; begin < rows.size(); begin += config.reps) {
    std::vector<double> rmse, loglik, frac;
    for (std::size_t i = begin; i < begin + config.reps; ++i) {
      rmse.push_back(rows[i].rmse);
      loglik.push_back(rows[i].loglik);
      frac.push_back(rows[i].censored_fraction);
    }
    summary << to_string(rows[begin].strategy) << ',' << slack_label(rows[begin].slack) << ','
            << format_real(median(rmse)) << ',' << format_real(median(loglik)) << ','
            << format_real(median(frac)) << '\n';
  }
  write_file(dir / "summary.csv", summary.str());
  return dir;
}

fs::path cmd_plot_data(const PlotDataConfig& config) {
  config.validate();
  const auto problem = load_problem(config.problem, std::nullopt);
  const auto& space = problem->space();
  if (space.size() != 1) {
    throw DomainError("plot-data supports 1-D problems only; '" + config.problem + "' has d=" +
                      std::to_string(space.size()));
  }
  if (space.is_categorical(0)) throw DomainError("plot-data needs a continuous dimension");

  std::vector<Observation> observations;
  if (config.trace) {
    std::istringstream in(read_file(*config.trace));
    for (const auto& r : read_trace_jsonl(in).records) {
      observations.push_back(Observation{r.theta, r.y, r.censored, r.cost});
    }
  }

  std::optional<Forest> forest;
  std::string transform = "log10";
  if (config.model) {
    auto doc = forest_from_json(read_file(*config.model));
    if (!(doc.forest.space() == space)) throw DomainError("model space does not match problem");
    transform = doc.response_transform;
    forest.emplace(std::move(doc.forest));
  } else {
    ForestConfig fc;
    fc.num_trees = config.num_trees;
    fc.seed = config.seed;
    fc.threads = config.threads;
    CensoredFitConfig fit;
    fit.kappa_max = to_log(config.kappa_max);
    fit.strategy = config.strategy;
    forest.emplace(fit_model(to_model_scale(observations), space, fc, fit).forest);
  }
  const auto scale = [&](double raw) { return transform == "log10" ? to_log(raw) : raw; };

  const auto& dim = std::get<Continuous>(space[0]);
  std::vector<double> grid(config.grid);
  std::vector<PredictiveDistribution> pred(config.grid);
  for (std::size_t k = 0; k < config.grid; ++k) {
    grid[k] = dim.low + (static_cast<double>(k) + 0.5) / static_cast<double>(config.grid) *
                            (dim.high - dim.low);
    pred[k] = forest->predict({grid[k]});
  }
  std::optional<double> f_min;
  for (const auto& o : observations) {
    if (!o.censored) f_min = std::min(f_min.value_or(o.y), o.y);
  }
  double model_f_min = 0.0;
  if (f_min) {
    model_f_min = scale(*f_min);
  } else {
    model_f_min = std::min_element(pred.begin(), pred.end(), [](const auto& a, const auto& b) {
                    return a.mu < b.mu;
                  })->mu;
  }
  std::vector<double> ei(config.grid);
  for (std::size_t k = 0; k < config.grid; ++k) {
    ei[k] = expected_improvement(pred[k].mu, pred[k].sd(), model_f_min);
  }
  const double ei_max = *std::max_element(ei.begin(), ei.end());

  const fs::path dir = prepare_dir(config.outdir, "plot-data", config.label);
  write_file(dir / "config.json", to_json(config).dump(2) + "\n");
  std::ostringstream out;
  out << "kind,theta,mu,mu_minus_2sd,mu_plus_2sd,ei_scaled,true_f,y,censored\n";
  for (std::size_t k = 0; k < config.grid; ++k) {
    const double sd = pred[k].sd();
    out << "grid," << format_real(grid[k]) << ',' << format_real(pred[k].mu) << ','
        << format_real(pred[k].mu - 2.0 * sd) << ',' << format_real(pred[k].mu + 2.0 * sd) << ','
        << format_real(ei_max > 0.0 ? ei[k] / ei_max : 0.0) << ','
        << format_real(scale(problem->value({grid[k]}))) << ",,\n";
  }
  for (const auto& o : observations) {
    out << "observation," << format_real(o.theta[0]) << ",,,,,," << format_real(scale(o.y)) << ','
        << (o.censored ? 1 : 0) << '\n';
  }
  write_file(dir / "plot.csv", out.str());
  return dir;
}

std::size_t cmd_check_monotonic(const std::vector<std::string>& problems, std::size_t pairs,
                                std::uint64_t seed, std::ostream& out) {
  if (pairs < 1) throw DomainError("pairs must be >= 1");
  std::vector<std::string> names = problems;
  if (names.empty() || (names.size() == 1 && names.front() == "all")) {
    names = shipped_problem_names();
  }
  std::vector<std::unique_ptr<Problem>> loaded;
  for (const auto& n : names) loaded.push_back(load_problem(n, std::nullopt));
  std::size_t total = 0;
  out << "problem,pairs,ties,violations\n";
  for (const auto& p : loaded) {
    const auto report = check_cost_monotonic(*p, pairs, seed);
    out << report.problem << ',' << report.pairs << ',' << report.ties << ','
        << report.violations << '\n';
    total += report.violations;
  }
  return total;
}

void cmd_fit(const FitConfig& config) {
  config.validate();
  const auto table = parse_numeric_csv(read_file(config.data), config.data);
  if (table.header.size() < 3 || table.header[table.header.size() - 2] != "y" ||
      table.header.back() != "censored") {
    throw IoError(config.data + ": header must be theta columns followed by y,censored");
  }
  const std::size_t d = table.header.size() - 2;
  const ConfigurationSpace space = config.space ? space_from_json(read_file(*config.space))
                                                : ConfigurationSpace::unit_cube(d);
  if (space.size() != d) throw DomainError("space dimension does not match the data columns");
  const bool log_scale = config.transform == "log10";
  std::vector<Observation> data;
  for (const auto& row : table.rows) {
    const double flag = row.back();
    if (flag != 0.0 && flag != 1.0) throw IoError(config.data + ": censored must be 0/1");
    Observation o{Configuration(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d)),
                  row[d], flag == 1.0, 0.0};
    if (log_scale) o.y = to_log(o.y);
    data.push_back(std::move(o));
  }
  ForestConfig fc;
  fc.num_trees = config.num_trees;
  fc.seed = config.seed;
  fc.threads = config.threads;
  CensoredFitConfig fit;
  fit.kappa_max = log_scale ? to_log(config.kappa_max) : config.kappa_max;
  fit.max_iterations = config.max_em_iterations;
  fit.strategy = config.strategy;
  auto result = fit_model(data, space, fc, fit);
  write_file(config.out, forest_to_json(ForestDocument{std::move(result.forest), config.transform}) + "\n");
}

void cmd_predict(const std::string& model_path, const std::string& query_path,
                 const std::string& out_path) {
  const auto doc = forest_from_json(read_file(model_path));
  const auto table = parse_numeric_csv(read_file(query_path), query_path);
  const auto& space = doc.forest.space();
  if (table.header.size() != space.size()) {
    throw IoError(query_path + ": expected " + std::to_string(space.size()) + " theta columns");
  }
  std::ostringstream out;
  for (const auto& h : table.header) out << h << ',';
  out << "mu,var\n";
  for (const auto& row : table.rows) {
    space.require_contains(row);
    const auto p = doc.forest.predict(row);
    for (double v : row) out << format_real(v) << ',';
    out << format_real(p.mu) << ',' << format_real(p.var) << '\n';
  }
  write_file(out_path, out.str());
}

}  // namespace censbo::cli
