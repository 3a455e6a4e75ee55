#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "censbo/space.hpp"

namespace censbo {

struct KnownOptimum {
  Configuration theta;
  double value = 0.0;
};

/// A cost-varying blackbox minimization problem (f, c) with positive
/// runtime-like responses.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string_view name() const = 0;
  virtual const ConfigurationSpace& space() const = 0;

  /// f(theta). Deterministic problems ignore noise_seed.
  virtual double value(const Configuration& theta, std::uint64_t noise_seed = 0) const = 0;

  /// c(theta), the cost of an uncapped evaluation. Defaults to f.
  virtual double cost(const Configuration& theta, std::uint64_t noise_seed = 0) const {
    return value(theta, noise_seed);
  }

  /// Runs the evaluation until it finishes or its cost reaches kappa. With
  /// c = f: f <= kappa gives (f, uncensored, cost f); otherwise (kappa,
  /// censored, cost kappa).
  virtual Observation evaluate_capped(const Configuration& theta, double kappa,
                                      std::uint64_t noise_seed = 0) const;

  virtual std::optional<KnownOptimum> known_optimum() const { return std::nullopt; }
  virtual bool is_noisy() const { return false; }
};

/// Multiplicative log-normal noise: f * exp(sigma_log * eps), eps ~ N(0, 1).
struct NoiseSpec {
  double sigma_log = 0.0;
};

/// A closed-form objective with c = f unless a separate cost is supplied.
class AnalyticProblem final : public Problem {
 public:
  using Function = std::function<double(const Configuration&)>;

  AnalyticProblem(std::string name, ConfigurationSpace space, Function f,
                  std::optional<KnownOptimum> optimum = std::nullopt, NoiseSpec noise = {},
                  Function cost = nullptr);

  std::string_view name() const override { return name_; }
  const ConfigurationSpace& space() const override { return space_; }
  double value(const Configuration& theta, std::uint64_t noise_seed = 0) const override;
  double cost(const Configuration& theta, std::uint64_t noise_seed = 0) const override;
  std::optional<KnownOptimum> known_optimum() const override { return optimum_; }
  bool is_noisy() const override { return noise_.sigma_log > 0.0; }

 private:
  std::string name_;
  ConfigurationSpace space_;
  Function f_;
  Function cost_;
  std::optional<KnownOptimum> optimum_;
  NoiseSpec noise_;
};

/// f(t) = 2 + sin(5 pi t) (1 - t / 2) + 3 (t - 1/2)^2 on [0, 1]. Two basins:
/// the global minimum below and a local one near t = 0.6899 (f = 1.46136).
std::unique_ptr<AnalyticProblem> make_synthetic_1d(NoiseSpec noise = {});
double synthetic_1d(double t);
inline constexpr double kSynthetic1dArgmin = 0.30325527609505183928;
inline constexpr double kSynthetic1dMin = 1.2688619586840365688;

/// f(t) = 0.1 + 4 (t - 0.3)^2 on [0, 1].
std::unique_ptr<AnalyticProblem> make_bowl_1d(NoiseSpec noise = {});

/// f = 0.5 * 10^(2 * sum_i (t_i - 0.35)^2) on [0, 1]^d: a runtime-like
/// objective spanning orders of magnitude.
std::unique_ptr<AnalyticProblem> make_log_sphere(std::size_t d, NoiseSpec noise = {});

/// Fixture with c = -f, violating cost monotonicity on every untied pair.
std::unique_ptr<AnalyticProblem> make_negated_cost_fixture();

/// Runtime of configuration theta on instance i, before any cap.
using RuntimeMetric =
    std::function<double(const Configuration& theta, std::size_t instance, std::uint64_t noise_seed)>;

/// Simulated algorithm-configuration scenario: the objective is the mean
/// runtime over a fixed instance sample, each run cut off at per_run_cap.
class ACScenario {
 public:
  ACScenario(ConfigurationSpace space, std::size_t num_instances, RuntimeMetric metric,
             double per_run_cap, std::optional<Configuration> best = std::nullopt,
             bool noisy = false);

  const ConfigurationSpace& space() const { return space_; }
  std::size_t num_instances() const { return num_instances_; }
  double per_run_cap() const { return per_run_cap_; }
  const std::optional<Configuration>& best_configuration() const { return best_; }
  bool is_noisy() const { return noisy_; }

  /// m(theta, pi_i) without the per-run cap.
  double raw_runtime(const Configuration& theta, std::size_t instance,
                     std::uint64_t noise_seed = 0) const;
  /// min(m(theta, pi_i), per_run_cap): what one completed run costs.
  double run(const Configuration& theta, std::size_t instance, std::uint64_t noise_seed = 0) const;
  /// (1/N) sum_i run(theta, i).
  double marginal(const Configuration& theta, std::uint64_t noise_seed = 0) const;

  /// Runs instances in order, each cut at min(per_run_cap, N * kappa - sum so
  /// far). Once the sum reaches N * kappa the evaluation stops with y = kappa,
  /// censored, cost = run time actually spent.
  Observation eval_marginal_capped(const Configuration& theta, double kappa,
                                   std::uint64_t noise_seed = 0) const;

 private:
  ConfigurationSpace space_;
  std::size_t num_instances_;
  RuntimeMetric metric_;
  double per_run_cap_;
  std::optional<Configuration> best_;
  bool noisy_;
};

struct ACScenarioSpec {
  std::size_t dims = 6;
  std::size_t instances = 10;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;
  double per_run_cap = 1000.0;
  /// Sigma of the per-instance log-normal hardness.
  double hardness_sigma = 0.5;
  /// Explicit per-instance hardness multipliers; must have `instances` entries when set.
  std::vector<double> hardness;

  void validate() const;
};

/// Synthetic scenario: m(theta, pi_i) = base(theta) * hardness_i * exp(eps).
/// Every third dimension is categorical; base(theta*) = 1 at a seed-fixed
/// theta* that minimizes base exactly.
ACScenario make_ac_scenario(const ACScenarioSpec& spec);
ACScenario make_ac_scenario(std::size_t dims, std::size_t instances, std::uint64_t seed);

/// Parses a scenario spec file body; throws IoError on malformed JSON.
ACScenarioSpec parse_scenario_spec(std::string_view json_text);
std::string scenario_spec_to_json(const ACScenarioSpec& spec);

/// Problem view of a scenario: f is the marginal and costs are measured per
/// instance (run time spent / N), so c = f and a censored query costs kappa.
class ACProblem final : public Problem {
 public:
  explicit ACProblem(ACScenario scenario, std::string name = "ac-scenario");

  std::string_view name() const override { return name_; }
  const ConfigurationSpace& space() const override { return scenario_.space(); }
  double value(const Configuration& theta, std::uint64_t noise_seed = 0) const override;
  Observation evaluate_capped(const Configuration& theta, double kappa,
                              std::uint64_t noise_seed = 0) const override;
  std::optional<KnownOptimum> known_optimum() const override;
  bool is_noisy() const override { return scenario_.is_noisy(); }

  const ACScenario& scenario() const { return scenario_; }

 private:
  ACScenario scenario_;
  std::string name_;
};

struct MonotonicityReport {
  std::string problem;
  std::size_t pairs = 0;
  std::size_t ties = 0;
  std::size_t violations = 0;
};

/// Samples uniform pairs and counts failures of f1 < f2 <=> c1 < c2 (both orders).
MonotonicityReport check_cost_monotonic(const Problem& problem, std::size_t num_pairs,
                                        std::uint64_t seed);

/// Names accepted by make_problem, all with c = f semantics.
std::vector<std::string> shipped_problem_names();
/// Throws DomainError for unknown names.
std::unique_ptr<Problem> make_problem(std::string_view name);

}  // namespace censbo
