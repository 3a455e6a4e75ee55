// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "censbo/acquisition.hpp"
#include "censbo/bo_loop.hpp"
#include "censbo/censored_fit.hpp"
#include "censbo/problems.hpp"
#include "censbo/random.hpp"
#include "censbo/stats.hpp"
#include "commands.hpp"
#include "oracles.hpp"

namespace {

using namespace censbo;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome truncated_normal_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mu_dist(-10.0, 10.0);
  std::uniform_real_distribution<double> log_sigma(-3.0, 3.0);
  const double probs[] = {0.02, 0.25, 0.5, 0.75, 0.98};
  double worst_mean = 0.0;
  double worst_quantile = 0.0;
  for (int i = 0; i < 200; ++i) {
    // alpha sweeps [-5, 30] so the far tail is covered evenly.
    const double alpha = -5.0 + 35.0 * static_cast<double>(i) / 199.0;
    const double mu = mu_dist(rng);
    const double sigma = std::exp(log_sigma(rng));
    const stats::TruncatedNormal d{mu, sigma, mu + alpha * sigma};
    // Errors are relative to max(|reference|, sigma): the location can sit at
    // zero, where a pure relative error is undefined.
    const auto ref = oracle::trunc_moments(d.mu, d.sigma, d.lower);
    worst_mean = std::max(worst_mean, std::abs(stats::trunc_mean(d) - ref.mean) /
                                          std::max(std::abs(ref.mean), sigma));
    const double p = probs[i % 5];
    const double q_ref = oracle::trunc_quantile(d.mu, d.sigma, d.lower, p);
    worst_quantile = std::max(worst_quantile, std::abs(stats::trunc_quantile(d, p) - q_ref) /
                                                  std::max(std::abs(q_ref), sigma));
  }
  const bool pass = worst_mean <= 1e-6 && worst_quantile <= 1e-6;
  return {pass, "200 triples, alpha in [-5, 30]; max rel err mean " + fmt(worst_mean) +
                    ", quantile " + fmt(worst_quantile) + " (tol 1e-6)"};
}

Outcome ei_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int within = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double mu = 5.0 * u(rng);
    const double sigma = std::exp(u(rng) / 1.5);
    const double f_min = mu + sigma * u(rng);
    const auto mc = oracle::monte_carlo_ei(mu, sigma, f_min, 1'000'000, 1000 + i);
    const double z = std::abs(expected_improvement(mu, sigma, f_min) - mc.mean) / mc.standard_error;
    worst_z = std::max(worst_z, z);
    within += z <= 3.0 ? 1 : 0;
  }
  const double at_mean = expected_improvement(1.7, 1.0, 1.7);
  const bool exact = std::abs(at_mean - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 1e-9;
  return {within == 50 && exact, std::to_string(within) + "/50 triples within 3 SE (max " +
                                     fmt(worst_z, 3) + " SE); EI(f_min=mu, sigma=1) = " +
                                     fmt(at_mean, 10)};
}

std::vector<Observation> invariant_dataset(std::uint64_t seed, const ConfigurationSpace& space) {
  Rng rng(seed);
  std::vector<Observation> data;
  for (int i = 0; i < 200; ++i) {
    auto theta = space.sample_uniform(rng);
    double f = 0.5 + 3.0 * (theta[0] - 0.3) * (theta[0] - 0.3) + theta[1] + 0.4 * theta[2];
    f *= std::exp(0.3 * stats::std_normal_quantile(0.001 + 0.998 * uniform01(rng)));
    if (i % 5 < 2) {
      data.push_back({theta, f * (0.3 + 0.7 * uniform01(rng)), true, 0.0});
    } else {
      data.push_back({theta, f, false, f});
    }
  }
  return data;
}

Outcome em_invariants() {
  const ConfigurationSpace space({Continuous{0.0, 1.0}, Continuous{0.0, 1.0}, Categorical{3}});
  std::size_t violations = 0;
  std::size_t max_iterations_seen = 0;
  std::size_t mismatched = 0;
  std::size_t clamped_points = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = invariant_dataset(seed, space);
    double largest = 0.0;
    for (const auto& o : data) largest = std::max(largest, o.y);
    CensoredFitConfig fit;
    fit.kappa_max = 1.05 * largest;
    ForestConfig forest;
    forest.num_trees = 100;
    forest.seed = seed;
    forest.threads = cli::threads_from_env();
    std::vector<ImputationState> states;
    CensoredFitOptions options;
    options.observer = [&](std::size_t, const ImputationState& s) {
      states.push_back(s);
      for (const auto& p : s.points) {
        const double mean = std::accumulate(p.values.begin(), p.values.end(), 0.0) /
                            static_cast<double>(p.values.size());
        if (mean > fit.kappa_max + 1e-9) ++violations;
        if (std::abs(mean - fit.kappa_max) < 1e-9) ++clamped_points;
        for (double v : p.values) violations += v < p.lower ? 1 : 0;
      }
    };
    const auto a = fit_censored(data, space, forest, fit, options);
    if (a.iterations > fit.max_iterations) ++violations;
    max_iterations_seen = std::max(max_iterations_seen, a.iterations);
    const auto first_states = std::move(states);
    states.clear();
    const auto b = fit_censored(data, space, forest, fit, options);
    bool same = a.iterations == b.iterations && a.imputations == b.imputations &&
                first_states.size() == states.size();
    for (std::size_t k = 0; same && k < states.size(); ++k) same = first_states[k] == states[k];
    for (double t = 0.0; same && t <= 1.0; t += 0.05) {
      for (double c = 0.0; c < 3.0; c += 1.0) {
        const auto pa = a.forest.predict({t, 1.0 - t, c});
        const auto pb = b.forest.predict({t, 1.0 - t, c});
        same = same && pa.mu == pb.mu && pa.var == pb.var;
      }
    }
    mismatched += same ? 0 : 1;
  }
  return {violations == 0 && mismatched == 0,
          "20 datasets (n=200, 40% censored): " + std::to_string(violations) +
              " bound violations, max iterations " + std::to_string(max_iterations_seen) +
              "/10, " + std::to_string(clamped_points) + " point-iterations at the cap, " +
              std::to_string(mismatched) + " non-identical reruns"};
}

Outcome uncertainty_preservation() {
  const ConfigurationSpace line({Continuous{0.0, 1.0}});
  std::vector<Observation> data;
  for (int i = 0; i < 20; ++i) {
    const double t = (i + 0.5) / 20.0;
    data.push_back({{t}, 1.0 + 2.0 * t + 0.5 * std::sin(17.0 * t), false, 1.0});
  }
  data[10].censored = true;
  data[10].y = 2.0;
  const std::size_t trees = 200;
  std::vector<std::vector<std::uint32_t>> rows(trees);
  for (auto& row : rows) {
    for (std::uint32_t j = 0; j < data.size(); ++j) row.push_back(j);
  }
  CensoredFitOptions options;
  options.ledger = BootstrapLedger::from_assignments(data.size(), rows);
  ImputedPoint first;
  options.observer = [&](std::size_t t, const ImputationState& s) {
    if (t == 1) first = s.points.at(0);
  };
  ForestConfig forest;
  forest.num_trees = trees;
  fit_censored(data, line, forest, CensoredFitConfig{}, options);
  if (first.values.size() != trees || !(first.predictive.var > 0.0)) {
    return {false, "fixture did not produce a spread predictive"};
  }
  const double mean = std::accumulate(first.values.begin(), first.values.end(), 0.0) / trees;
  double var = 0.0;
  for (double v : first.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(trees);
  const double target =
      stats::trunc_variance({first.predictive.mu, first.predictive.sd(), first.lower});
  const double ratio = var / target;
  return {std::abs(ratio - 1.0) <= 0.25, "B=" + std::to_string(trees) +
                                            " copies; imputation variance / truncated variance = " +
                                            fmt(ratio)};
}

Outcome model_quality_direction() {
  cli::BenchmarkModelConfig c;
  c.slacks = {1.0};
  c.threads = cli::threads_from_env();
  const auto rows = cli::run_benchmark_model(c);
  auto collect = [&](CensoringStrategy s, bool rmse) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.strategy == s) v.push_back(rmse ? r.rmse : r.loglik);
    }
    return median(v);
  };
  const double sampled = collect(CensoringStrategy::SamplingSchmeeHahn, true);
  const double mean_imp = collect(CensoringStrategy::SchmeeHahnMean, true);
  const double drop = collect(CensoringStrategy::DropCensored, true);
  const double naive = collect(CensoringStrategy::TreatAsUncensored, true);
  const double ll_sampled = collect(CensoringStrategy::SamplingSchmeeHahn, false);
  const double ll_mean = collect(CensoringStrategy::SchmeeHahnMean, false);
  std::vector<double> censored;
  for (const auto& r : rows) censored.push_back(r.censored_fraction);
  const bool pass = std::max(sampled, mean_imp) < std::min(drop, naive) && ll_sampled > ll_mean;
  return {pass, "median RMSE sampling " + fmt(sampled) + ", mean " + fmt(mean_imp) + ", drop " +
                    fmt(drop) + ", as-exact " + fmt(naive) + "; median loglik sampling " +
                    fmt(ll_sampled) + " vs mean " + fmt(ll_mean) + "; censored share " +
                    fmt(median(censored), 3)};
}

Outcome bo_effectiveness() {
  cli::OptimizeConfig c;
  c.problem = "synthetic-1d";
  c.slacks = {1.3};
  c.reps = 10;
  c.budget = 300.0;
  c.threads = cli::threads_from_env();
  const auto runs = cli::run_optimize(c);
  int hits = 0;
  std::string values;
  for (const auto& run : runs) {
    const double f = run.trace.final_f_min.value_or(INFINITY);
    hits += f <= 1.05 * kSynthetic1dMin ? 1 : 0;
    values += (values.empty() ? "" : " ") + fmt(f, 5);
  }
  return {hits >= 8, std::to_string(hits) + "/10 seeds within 5% of " + fmt(kSynthetic1dMin, 6) +
                         " (final f_min: " + values + ")"};
}

Outcome capping_benefit() {
  cli::OptimizeConfig c;
  c.problem = "ac-default";
  c.slacks = {1.3, kNoCensoring};
  c.reps = 10;
  c.budget = 500.0;
  c.threads = cli::threads_from_env();
  const auto runs = cli::run_optimize(c);
  std::vector<double> capped;
  std::vector<double> uncapped;
  std::size_t capped_evals = 0;
  std::size_t uncapped_evals = 0;
  for (const auto& run : runs) {
    const double f = run.trace.final_f_min.value_or(INFINITY);
    if (run.slack == 1.3) {
      capped.push_back(f);
      capped_evals += run.trace.records.size();
    } else {
      uncapped.push_back(f);
      uncapped_evals += run.trace.records.size();
    }
  }
  const double m_capped = median(capped);
  const double m_uncapped = median(uncapped);
  return {m_capped <= m_uncapped && capped_evals >= uncapped_evals,
          "budget 500 per run; median final f_min slack 1.3 " + fmt(m_capped) + " vs none " +
              fmt(m_uncapped) + "; evaluations " + std::to_string(capped_evals) + " vs " +
              std::to_string(uncapped_evals)};
}

Outcome monotonicity() {
  std::size_t shipped_violations = 0;
  std::string names;
  for (const auto& name : shipped_problem_names()) {
    const auto problem = make_problem(name);
    shipped_violations += check_cost_monotonic(*problem, 1000, 1).violations;
    names += (names.empty() ? "" : ",") + name;
  }
  const auto fixture = make_negated_cost_fixture();
  const auto report = check_cost_monotonic(*fixture, 1000, 1);
  return {shipped_violations == 0 && report.violations > 0 &&
              report.violations + report.ties == report.pairs,
          std::to_string(shipped_violations) + " violations on " + names + "; fixture " +
              std::to_string(report.violations) + "/1000"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "censbo_acceptance_determinism";
  fs::remove_all(root);
  cli::OptimizeConfig c;
  c.problem = "synthetic-1d";
  c.reps = 2;
  c.budget = 40.0;
  c.outdir = root.string();
  c.label = "first";
  const auto a = cli::cmd_optimize(c);
  c.label = "second";
  const auto b = cli::cmd_optimize(c);
  std::size_t files = 0;
  std::size_t differing = 0;
  for (const auto& entry : fs::directory_iterator(a / "traces")) {
    if (entry.path().extension() != ".jsonl") continue;
    ++files;
    const auto other = b / "traces" / entry.path().filename();
    if (!fs::exists(other) || cli::read_file(entry.path()) != cli::read_file(other)) ++differing;
  }
  fs::remove_all(root);
  return {files == 4 && differing == 0,
          std::to_string(files) + " JSONL traces compared, " + std::to_string(differing) +
              " differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"truncated-normal oracle", 10.0, truncated_normal_oracle},
      {"EI oracle", 30.0, ei_oracle},
      {"EM invariants", 120.0, em_invariants},
      {"uncertainty preservation", 30.0, uncertainty_preservation},
      {"model-quality direction", 900.0, model_quality_direction},
      {"BO effectiveness", 600.0, bo_effectiveness},
      {"capping benefit", 1800.0, capping_benefit},
      {"cost monotonicity", 5.0, monotonicity},
      {"determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %s: %s; %.1f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                out.detail.c_str(), secs, c.time_limit_s, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
