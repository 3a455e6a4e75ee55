#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "censbo/acquisition.hpp"
#include "censbo/censored_fit.hpp"
#include "censbo/forest.hpp"
#include "censbo/problems.hpp"
#include "censbo/space.hpp"

namespace censbo {

inline constexpr double kNoCensoring = std::numeric_limits<double>::infinity();
/// Raw responses are floored here before the log10 transform.
inline constexpr double kResponseFloor = 0.005;

struct CensoringPolicy {
  /// Multiplier on the incumbent value; kNoCensoring caps at kappa_max only.
  double slack_factor = 1.3;
  double kappa_max = 10000.0;

  void validate() const;
};

struct BudgetSpec {
  double max_cumulative_cost = 0.0;
  std::optional<std::size_t> max_evaluations;

  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  Configuration theta;
  double kappa_used = 0.0;
  double y = 0.0;
  bool censored = false;
  double cost = 0.0;
  double cumulative_cost = 0.0;
  std::optional<double> f_min_after;
  std::optional<Configuration> incumbent_after;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::optional<Configuration> final_incumbent;
  std::optional<double> final_f_min;
  /// False when the budget ran out before any uncensored observation.
  bool complete = false;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// min(slack * f_min, kappa_max), or kappa_max without an incumbent.
/// Throws DomainError if f_min <= 0.
double censoring_threshold(const CensoringPolicy& policy, std::optional<double> f_min);

/// One point per equal-width stratum in every continuous dimension (strata
/// permuted independently); categorical levels are cycled in a shuffled order.
std::vector<Configuration> latin_hypercube(const ConfigurationSpace& space, std::size_t n,
                                           std::uint64_t seed);

/// Capped evaluation through the problem; throws DomainError if kappa <= 0.
Observation evaluate_with_cap(const Problem& problem, const Configuration& theta, double kappa,
                              std::uint64_t noise_seed = 0);

/// max(2, min(2d + 2, floor(budget / (4 kappa_max)))).
std::size_t default_init_size(const ConfigurationSpace& space, const BudgetSpec& budget,
                              const CensoringPolicy& policy);

/// Censoring-aware Bayesian optimization. The surrogate sees
/// log10(max(y, kResponseFloor)) with fit_config.kappa_max replaced by the
/// transformed policy.kappa_max; the trace reports raw values. forest_config
/// and acq_config seeds are ignored in favour of per-iteration seeds derived
/// from `seed`.
RunTrace optimize(const Problem& problem, const ConfigurationSpace& space,
                  const CensoringPolicy& policy, const BudgetSpec& budget,
                  const ForestConfig& forest_config, const CensoredFitConfig& fit_config,
                  const AcquisitionConfig& acq_config, std::optional<std::size_t> init_size,
                  std::uint64_t seed);

/// Throws InternalError naming the first violated trace invariant: strictly
/// increasing cumulative cost equal to the running sum of costs, censored
/// records at y = kappa_used, and thresholds honouring the policy.
void check_trace_invariants(const RunTrace& trace, const CensoringPolicy& policy);

}  // namespace censbo
