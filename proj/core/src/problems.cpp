#include "censbo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "censbo/error.hpp"
#include "censbo/random.hpp"

namespace censbo {
namespace {

double noise_factor(double sigma_log, std::uint64_t noise_seed, std::uint64_t tag) {
  if (sigma_log <= 0.0) return 1.0;
  Rng rng(derive_seed(noise_seed, {stream::kNoise, tag}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  return std::exp(sigma_log * gauss(rng));
}

void require_positive_kappa(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("censoring threshold kappa must be positive");
}

// Structure of the synthetic scenario's base runtime, drawn once per seed.
struct ScenarioShape {
  std::vector<double> weight;      // continuous dims: decades per squared unit distance
  std::vector<double> centre;      // continuous dims: optimum coordinate
  std::vector<std::vector<double>> level_penalty;  // categorical dims: decades per level
  std::vector<double> hardness;    // per instance
  Configuration best;
};

ConfigurationSpace scenario_space(std::size_t dims) {
  std::vector<Dimension> out;
  for (std::size_t k = 0; k < dims; ++k) {
    if (k % 3 == 2) {
      out.emplace_back(Categorical{3 + (k / 3) % 2});
    } else {
      out.emplace_back(Continuous{0.0, 1.0});
    }
  }
  return ConfigurationSpace(std::move(out));
}

ScenarioShape draw_shape(const ACScenarioSpec& spec, const ConfigurationSpace& space) {
  Rng rng(derive_seed(spec.seed, {stream::kScenario}));
  ScenarioShape s;
  s.weight.assign(spec.dims, 0.0);
  s.centre.assign(spec.dims, 0.0);
  s.level_penalty.assign(spec.dims, {});
  s.best.assign(spec.dims, 0.0);
  for (std::size_t k = 0; k < spec.dims; ++k) {
    if (space.is_categorical(k)) {
      const auto levels = std::get<Categorical>(space[k]).num_levels;
      const auto good = static_cast<std::size_t>(rng() % levels);
      auto& pen = s.level_penalty[k];
      pen.assign(levels, 0.0);
      for (std::size_t l = 0; l < levels; ++l) {
        if (l != good) pen[l] = 0.3 + 0.9 * uniform01(rng);
      }
      s.best[k] = static_cast<double>(good);
    } else {
      s.weight[k] = 1.5 + 1.5 * uniform01(rng);
      s.centre[k] = 0.15 + 0.7 * uniform01(rng);
      s.best[k] = s.centre[k];
    }
  }
  if (!spec.hardness.empty()) {
    s.hardness = spec.hardness;
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < spec.instances; ++i) {
      s.hardness.push_back(std::exp(spec.hardness_sigma * gauss(rng)));
    }
  }
  return s;
}

}  // namespace

Observation Problem::evaluate_capped(const Configuration& theta, double kappa,
                                     std::uint64_t noise_seed) const {
  require_positive_kappa(kappa);
  const double f = value(theta, noise_seed);
  if (f <= kappa) return Observation{theta, f, false, f};
  return Observation{theta, kappa, true, kappa};
}

AnalyticProblem::AnalyticProblem(std::string name, ConfigurationSpace space, Function f,
                                 std::optional<KnownOptimum> optimum, NoiseSpec noise,
                                 Function cost)
    : name_(std::move(name)),
      space_(std::move(space)),
      f_(std::move(f)),
      cost_(std::move(cost)),
      optimum_(std::move(optimum)),
      noise_(noise) {
  if (!f_) throw DomainError("AnalyticProblem: objective required");
  if (noise_.sigma_log < 0.0) throw DomainError("AnalyticProblem: negative noise sigma");
}

double AnalyticProblem::value(const Configuration& theta, std::uint64_t noise_seed) const {
  space_.require_contains(theta);
  return f_(theta) * noise_factor(noise_.sigma_log, noise_seed, 0);
}

double AnalyticProblem::cost(const Configuration& theta, std::uint64_t noise_seed) const {
  if (!cost_) return value(theta, noise_seed);
  space_.require_contains(theta);
  return cost_(theta);
}

double synthetic_1d(double t) {
  return 2.0 + std::sin(5.0 * std::numbers::pi * t) * (1.0 - 0.5 * t) + 3.0 * (t - 0.5) * (t - 0.5);
}

std::unique_ptr<AnalyticProblem> make_synthetic_1d(NoiseSpec noise) {
  return std::make_unique<AnalyticProblem>(
      "synthetic-1d", ConfigurationSpace::unit_cube(1),
      [](const Configuration& x) { return synthetic_1d(x[0]); },
      KnownOptimum{{kSynthetic1dArgmin}, kSynthetic1dMin}, noise);
}

std::unique_ptr<AnalyticProblem> make_bowl_1d(NoiseSpec noise) {
  return std::make_unique<AnalyticProblem>(
      "bowl-1d", ConfigurationSpace::unit_cube(1),
      [](const Configuration& x) { return 0.1 + 4.0 * (x[0] - 0.3) * (x[0] - 0.3); },
      KnownOptimum{{0.3}, 0.1}, noise);
}

std::unique_ptr<AnalyticProblem> make_log_sphere(std::size_t d, NoiseSpec noise) {
  if (d == 0) throw DomainError("make_log_sphere: d must be >= 1");
  return std::make_unique<AnalyticProblem>(
      "log-sphere-" + std::to_string(d) + "d", ConfigurationSpace::unit_cube(d),
      [](const Configuration& x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.35) * (v - 0.35);
        return 0.5 * std::pow(10.0, 2.0 * s);
      },
      KnownOptimum{Configuration(d, 0.35), 0.5}, noise);
}

std::unique_ptr<AnalyticProblem> make_negated_cost_fixture() {
  auto f = [](const Configuration& x) { return synthetic_1d(x[0]); };
  return std::make_unique<AnalyticProblem>(
      "negated-cost-fixture", ConfigurationSpace::unit_cube(1), f, std::nullopt, NoiseSpec{},
      [f](const Configuration& x) { return -f(x); });
}

ACScenario::ACScenario(ConfigurationSpace space, std::size_t num_instances, RuntimeMetric metric,
                       double per_run_cap, std::optional<Configuration> best, bool noisy)
    : space_(std::move(space)),
      num_instances_(num_instances),
      metric_(std::move(metric)),
      per_run_cap_(per_run_cap),
      best_(std::move(best)),
      noisy_(noisy) {
  if (num_instances_ == 0) throw DomainError("ACScenario: at least one instance required");
  if (!metric_) throw DomainError("ACScenario: runtime metric required");
  if (!(per_run_cap_ > 0.0)) throw DomainError("ACScenario: per_run_cap must be positive");
}

double ACScenario::raw_runtime(const Configuration& theta, std::size_t instance,
                               std::uint64_t noise_seed) const {
  if (instance >= num_instances_) throw DomainError("ACScenario: instance index out of range");
  return metric_(theta, instance, noise_seed);
}

double ACScenario::run(const Configuration& theta, std::size_t instance,
                       std::uint64_t noise_seed) const {
  return std::min(raw_runtime(theta, instance, noise_seed), per_run_cap_);
}

double ACScenario::marginal(const Configuration& theta, std::uint64_t noise_seed) const {
  space_.require_contains(theta);
  double sum = 0.0;
  for (std::size_t i = 0; i < num_instances_; ++i) sum += run(theta, i, noise_seed);
  return sum / static_cast<double>(num_instances_);
}

Observation ACScenario::eval_marginal_capped(const Configuration& theta, double kappa,
                                             std::uint64_t noise_seed) const {
  require_positive_kappa(kappa);
  space_.require_contains(theta);
  const double n = static_cast<double>(num_instances_);
  // Total run time at which the optimistic mean lower bound reaches kappa.
  const double total_budget = n * kappa;
  double spent = 0.0;
  for (std::size_t i = 0; i < num_instances_; ++i) {
    const double limit = std::min(per_run_cap_, std::max(0.0, total_budget - spent));
    const double runtime = raw_runtime(theta, i, noise_seed);
    if (runtime <= limit) {
      spent += runtime;
      continue;
    }
    const bool budget_bound = total_budget - spent <= per_run_cap_;
    spent += limit;
    if (budget_bound) return Observation{theta, kappa, true, spent};
  }
  return Observation{theta, spent / n, false, spent};
}

void ACScenarioSpec::validate() const {
  if (dims < 1) throw DomainError("scenario: dims must be >= 1");
  if (instances < 1) throw DomainError("scenario: instances must be >= 1");
  if (noise_sigma < 0.0) throw DomainError("scenario: noise_sigma must be >= 0");
  if (!(per_run_cap > 0.0)) throw DomainError("scenario: per_run_cap must be positive");
  if (hardness_sigma < 0.0) throw DomainError("scenario: hardness_sigma must be >= 0");
  if (!hardness.empty()) {
    if (hardness.size() != instances) {
      throw DomainError("scenario: hardness overrides must list one value per instance");
    }
    for (double h : hardness) {
      if (!(h > 0.0)) throw DomainError("scenario: hardness values must be positive");
    }
  }
}

ACScenario make_ac_scenario(const ACScenarioSpec& spec) {
  spec.validate();
  ConfigurationSpace space = scenario_space(spec.dims);
  auto shape = std::make_shared<const ScenarioShape>(draw_shape(spec, space));
  const double noise_sigma = spec.noise_sigma;
  RuntimeMetric metric = [shape, noise_sigma](const Configuration& theta, std::size_t instance,
                                              std::uint64_t noise_seed) {
    double decades = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      if (!shape->level_penalty[k].empty()) {
        decades += shape->level_penalty[k][static_cast<std::size_t>(theta[k])];
      } else {
        const double d = theta[k] - shape->centre[k];
        decades += shape->weight[k] * d * d;
      }
    }
    return std::pow(10.0, decades) * shape->hardness[instance] *
           noise_factor(noise_sigma, noise_seed, instance);
  };
  return ACScenario(std::move(space), spec.instances, std::move(metric), spec.per_run_cap,
                    shape->best, noise_sigma > 0.0);
}

ACScenario make_ac_scenario(std::size_t dims, std::size_t instances, std::uint64_t seed) {
  ACScenarioSpec spec;
  spec.dims = dims;
  spec.instances = instances;
  spec.seed = seed;
  return make_ac_scenario(spec);
}

ACScenarioSpec parse_scenario_spec(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    ACScenarioSpec spec;
    spec.dims = j.value("dims", spec.dims);
    spec.instances = j.value("instances", spec.instances);
    spec.seed = j.value("seed", spec.seed);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.per_run_cap = j.value("per_run_cap", spec.per_run_cap);
    spec.hardness_sigma = j.value("hardness_sigma", spec.hardness_sigma);
    if (j.contains("hardness")) spec.hardness = j.at("hardness").get<std::vector<double>>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("scenario spec: ") + e.what());
  }
}

std::string scenario_spec_to_json(const ACScenarioSpec& spec) {
  nlohmann::json j{{"dims", spec.dims},
                   {"instances", spec.instances},
                   {"seed", spec.seed},
                   {"noise_sigma", spec.noise_sigma},
                   {"per_run_cap", spec.per_run_cap},
                   {"hardness_sigma", spec.hardness_sigma}};
  if (!spec.hardness.empty()) j["hardness"] = spec.hardness;
  return j.dump(2);
}

ACProblem::ACProblem(ACScenario scenario, std::string name)
    : scenario_(std::move(scenario)), name_(std::move(name)) {}

double ACProblem::value(const Configuration& theta, std::uint64_t noise_seed) const {
  return scenario_.marginal(theta, noise_seed);
}

Observation ACProblem::evaluate_capped(const Configuration& theta, double kappa,
                                       std::uint64_t noise_seed) const {
  Observation obs = scenario_.eval_marginal_capped(theta, kappa, noise_seed);
  obs.cost /= static_cast<double>(scenario_.num_instances());
  return obs;
}

std::optional<KnownOptimum> ACProblem::known_optimum() const {
  const auto& best = scenario_.best_configuration();
  if (!best || scenario_.is_noisy()) return std::nullopt;
  return KnownOptimum{*best, scenario_.marginal(*best)};
}

MonotonicityReport check_cost_monotonic(const Problem& problem, std::size_t num_pairs,
                                        std::uint64_t seed) {
  MonotonicityReport report;
  report.problem = std::string(problem.name());
  report.pairs = num_pairs;
  Rng rng(seed);
  const auto& space = problem.space();
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const Configuration a = space.sample_uniform(rng);
    const Configuration b = space.sample_uniform(rng);
    const double fa = problem.value(a);
    const double fb = problem.value(b);
    const double ca = problem.cost(a);
    const double cb = problem.cost(b);
    if (fa == fb) ++report.ties;
    const bool forward = (fa < fb) == (ca < cb);
    const bool backward = (fb < fa) == (cb < ca);
    if (!forward || !backward) ++report.violations;
  }
  return report;
}

std::vector<std::string> shipped_problem_names() {
  return {"synthetic-1d", "bowl-1d", "log-sphere-3d", "ac-default"};
}

std::unique_ptr<Problem> make_problem(std::string_view name) {
  if (name == "synthetic-1d") return make_synthetic_1d();
  if (name == "bowl-1d") return make_bowl_1d();
  if (name == "log-sphere-3d") return make_log_sphere(3);
  if (name == "ac-default") {
    return std::make_unique<ACProblem>(make_ac_scenario(ACScenarioSpec{}), "ac-default");
  }
  throw DomainError("unknown problem '" + std::string(name) + "'");
}

}  // namespace censbo
