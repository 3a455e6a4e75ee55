#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "censbo/forest.hpp"
#include "censbo/space.hpp"

namespace censbo {

/// How censored observations enter the forest.
enum class CensoringStrategy {
  /// EM with stratified truncated-normal quantiles spread across bootstrap copies.
  SamplingSchmeeHahn,
  /// EM imputing the truncated-normal mean into every copy.
  SchmeeHahnMean,
  /// Ignore censored observations.
  DropCensored,
  /// Use censored lower bounds as if they were exact values.
  TreatAsUncensored,
};

std::string_view to_string(CensoringStrategy s);
/// Accepts the enumerator names; throws DomainError otherwise.
CensoringStrategy parse_strategy(std::string_view name);

struct CensoredFitConfig {
  std::size_t max_iterations = 10;
  /// Converged when max |new - old| / max(1, |old|) over all imputed copies is below this.
  double convergence_tol = 1e-3;
  /// Known maximal response; the mean imputation of any point never exceeds it.
  double kappa_max = 10000.0;
  CensoringStrategy strategy = CensoringStrategy::SamplingSchmeeHahn;

  void validate() const;
};

struct ImputedPoint {
  std::size_t index = 0;
  double lower = 0.0;
  /// Forest prediction at the point that the values were drawn from.
  PredictiveDistribution predictive;
  /// One value per bootstrap copy, ordered like ledger.locations[index].
  std::vector<double> values;
};

struct ImputationState {
  std::vector<ImputedPoint> points;

  friend bool operator==(const ImputationState&, const ImputationState&);
};

bool operator==(const ImputedPoint& a, const ImputedPoint& b);

struct CensoredFitResult {
  Forest forest;
  ImputationState imputations;
  std::size_t iterations = 0;
  bool converged = false;
};

using ImputationObserver = std::function<void(std::size_t iteration, const ImputationState&)>;

struct CensoredFitOptions {
  /// Replaces the drawn ledger; must have data.size() slots per row and num_trees rows.
  std::optional<BootstrapLedger> ledger;
  /// Called after every imputation step, before the refit.
  ImputationObserver observer;
};

/// Sampling-based Schmee-Hahn EM. Throws UnfitError without uncensored data.
CensoredFitResult fit_censored(std::span<const Observation> data, const ConfigurationSpace& space,
                               const ForestConfig& forest_config,
                               const CensoredFitConfig& fit_config,
                               const CensoredFitOptions& options = {});

/// The comparison strategies (fit_config.strategy must not be SamplingSchmeeHahn).
CensoredFitResult fit_baseline(std::span<const Observation> data, const ConfigurationSpace& space,
                               const ForestConfig& forest_config,
                               const CensoredFitConfig& fit_config,
                               const CensoredFitOptions& options = {});

/// Dispatches on fit_config.strategy.
CensoredFitResult fit_model(std::span<const Observation> data, const ConfigurationSpace& space,
                            const ForestConfig& forest_config, const CensoredFitConfig& fit_config,
                            const CensoredFitOptions& options = {});

/// Shifts sorted samples down so their mean is at most cap while no value
/// drops below lower. Reduces to subtracting (mean - cap) from every sample
/// when that keeps all values >= lower. Requires lower <= cap.
void clamp_mean_to_cap(std::vector<double>& sorted_values, double lower, double cap);

struct LabeledPoint {
  Configuration theta;
  double value = 0.0;
};

struct ModelScore {
  double rmse = 0.0;
  double mean_log_likelihood = 0.0;
};

/// RMSE of the predictive mean and mean Gaussian log density of the truth
/// under N(mu, var + var_floor). Throws DomainError on an empty test set.
ModelScore evaluate_model(const Forest& forest, std::span<const LabeledPoint> test,
                          double var_floor);

/// 1e-6 * (largest uncensored response)^2, the variance floor for evaluate_model.
double default_var_floor(std::span<const Observation> data);

}  // namespace censbo
