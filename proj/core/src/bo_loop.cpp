#include "censbo/bo_loop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "censbo/error.hpp"
#include "censbo/random.hpp"

namespace censbo {
namespace {

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

double to_model_scale(double raw) { return std::log10(std::max(raw, kResponseFloor)); }

// Mean of uncensored replicates per configuration; the incumbent is the
// configuration with the smallest mean.
class IncumbentTracker {
 public:
  void add(const Observation& obs) {
    if (obs.censored) return;
    auto& [sum, count] = replicates_[obs.theta];
    sum += obs.y;
    ++count;
  }

  bool empty() const { return replicates_.empty(); }

  std::pair<Configuration, double> best() const {
    auto it = replicates_.begin();
    Configuration theta = it->first;
    double value = it->second.first / static_cast<double>(it->second.second);
    for (++it; it != replicates_.end(); ++it) {
      const double mean = it->second.first / static_cast<double>(it->second.second);
      if (mean < value) {
        value = mean;
        theta = it->first;
      }
    }
    return {std::move(theta), value};
  }

 private:
  std::map<Configuration, std::pair<double, std::size_t>> replicates_;
};

}  // namespace

void CensoringPolicy::validate() const {
  if (std::isnan(slack_factor) || slack_factor < 1.0) {
    throw DomainError("slack_factor must be >= 1");
  }
  if (!(kappa_max > 0.0) || !std::isfinite(kappa_max)) {
    throw DomainError("kappa_max must be positive and finite");
  }
}

void BudgetSpec::validate() const {
  if (!(max_cumulative_cost > 0.0)) throw DomainError("max_cumulative_cost must be positive");
  if (max_evaluations && *max_evaluations == 0) {
    throw DomainError("max_evaluations must be positive when set");
  }
}

double censoring_threshold(const CensoringPolicy& policy, std::optional<double> f_min) {
  policy.validate();
  if (!f_min) return policy.kappa_max;
  if (!(*f_min > 0.0)) throw DomainError("censoring_threshold: f_min must be positive");
  if (std::isinf(policy.slack_factor)) return policy.kappa_max;
  return std::min(policy.slack_factor * *f_min, policy.kappa_max);
}

std::vector<Configuration> latin_hypercube(const ConfigurationSpace& space, std::size_t n,
                                           std::uint64_t seed) {
  if (n == 0) throw DomainError("latin_hypercube: n must be >= 1");
  Rng rng(derive_seed(seed, {stream::kDesign}));
  std::vector<Configuration> points(n, Configuration(space.size(), 0.0));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto perm = random_permutation(n, rng);
    if (const auto* cat = std::get_if<Categorical>(&space[k])) {
      const auto order = random_permutation(cat->num_levels, rng);
      for (std::size_t i = 0; i < n; ++i) {
        points[i][k] = static_cast<double>(order[perm[i] % cat->num_levels]);
      }
    } else {
      const auto& c = std::get<Continuous>(space[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(perm[i]) + uniform01(rng)) * inv_n;
        points[i][k] = std::min(c.low + u * (c.high - c.low), std::nextafter(c.high, c.low));
      }
    }
  }
  return points;
}

Observation evaluate_with_cap(const Problem& problem, const Configuration& theta, double kappa,
                              std::uint64_t noise_seed) {
  if (!(kappa > 0.0)) throw DomainError("evaluate_with_cap: kappa must be positive");
  return problem.evaluate_capped(theta, kappa, noise_seed);
}

std::size_t default_init_size(const ConfigurationSpace& space, const BudgetSpec& budget,
                              const CensoringPolicy& policy) {
  const double by_budget = std::floor(budget.max_cumulative_cost / (4.0 * policy.kappa_max));
  const auto by_dim = static_cast<double>(2 * space.size() + 2);
  return static_cast<std::size_t>(std::max(2.0, std::min(by_dim, by_budget)));
}

RunTrace optimize(const Problem& problem, const ConfigurationSpace& space,
                  const CensoringPolicy& policy, const BudgetSpec& budget,
                  const ForestConfig& forest_config, const CensoredFitConfig& fit_config,
                  const AcquisitionConfig& acq_config, std::optional<std::size_t> init_size,
                  std::uint64_t seed) {
  policy.validate();
  budget.validate();
  forest_config.validate();
  fit_config.validate();
  acq_config.validate();
  if (!(space == problem.space())) throw DomainError("optimize: space does not match problem");
  const std::size_t n_init = init_size.value_or(default_init_size(space, budget, policy));
  if (n_init < 2) throw DomainError("optimize: init_size must be >= 2");

  CensoredFitConfig model_fit = fit_config;
  model_fit.kappa_max = to_model_scale(policy.kappa_max);

  const auto design = latin_hypercube(space, n_init, seed);
  RunTrace trace;
  std::vector<Observation> model_data;
  IncumbentTracker tracker;
  std::optional<double> f_min;
  std::optional<Configuration> incumbent;
  double cumulative = 0.0;

  auto budget_left = [&] {
    if (cumulative >= budget.max_cumulative_cost) return false;
    return !budget.max_evaluations || trace.records.size() < *budget.max_evaluations;
  };

  auto next_query = [&](std::size_t iteration) -> Configuration {
    if (iteration < design.size()) return design[iteration];
    const std::size_t model_step = iteration - design.size() + 1;
    const bool interleave =
        acq_config.random_interleave > 0 && model_step % acq_config.random_interleave == 0;
    if (!f_min || interleave) {
      Rng rng(derive_seed(seed, {stream::kRandomFill, iteration}));
      return space.sample_uniform(rng);
    }
    ForestConfig fc = forest_config;
    fc.seed = derive_seed(seed, {stream::kTree, iteration});
    const auto fit = fit_model(model_data, space, fc, model_fit);
    AcquisitionConfig ac = acq_config;
    ac.seed = derive_seed(seed, {stream::kAcquisition, iteration});
    return maximize_ei(fit.forest, to_model_scale(*f_min), space, ac, incumbent).theta;
  };

  for (std::size_t iteration = 0; budget_left(); ++iteration) {
    const Configuration theta = next_query(iteration);
    const double kappa = censoring_threshold(policy, f_min);
    const Observation obs =
        evaluate_with_cap(problem, theta, kappa, derive_seed(seed, {stream::kNoise, iteration}));
    if (!(obs.cost > 0.0)) throw InternalError("optimize: evaluation reported non-positive cost");
    cumulative += obs.cost;
    tracker.add(obs);
    if (!tracker.empty()) {
      auto [best_theta, best_value] = tracker.best();
      f_min = best_value;
      incumbent = std::move(best_theta);
    }
    model_data.push_back(Observation{obs.theta, to_model_scale(obs.y), obs.censored, obs.cost});
    trace.records.push_back(TraceRecord{iteration, theta, kappa, obs.y, obs.censored, obs.cost,
                                        cumulative, f_min, incumbent});
  }

  trace.final_f_min = f_min;
  trace.final_incumbent = incumbent;
  trace.complete = f_min.has_value();
  return trace;
}

void check_trace_invariants(const RunTrace& trace, const CensoringPolicy& policy) {
  double running = 0.0;
  std::optional<double> f_min;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const std::string where = "trace record " + std::to_string(i) + ": ";
    running += r.cost;
    if (r.cumulative_cost != running) throw InternalError(where + "cumulative cost mismatch");
    if (i > 0 && !(r.cumulative_cost > trace.records[i - 1].cumulative_cost)) {
      throw InternalError(where + "cumulative cost not strictly increasing");
    }
    if (r.kappa_used != censoring_threshold(policy, f_min)) {
      throw InternalError(where + "threshold does not follow the policy");
    }
    if (r.censored && r.y != r.kappa_used) throw InternalError(where + "censored y != kappa");
    if (r.censored && f_min && std::isfinite(policy.slack_factor) &&
        r.y < std::min(policy.slack_factor * *f_min, policy.kappa_max) - 1e-9) {
      throw InternalError(where + "censored below the slack threshold");
    }
    f_min = r.f_min_after;
  }
  if (!trace.records.empty() && trace.final_f_min != trace.records.back().f_min_after) {
    throw InternalError("trace final_f_min differs from the last record");
  }
}

}  // namespace censbo
