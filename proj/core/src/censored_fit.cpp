#include "censbo/censored_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "censbo/error.hpp"
#include "censbo/stats.hpp"
#include "parallel.hpp"

namespace censbo {
namespace {

enum class Imputation { Stratified, Mean };

constexpr double kBoundSlack = 1e-9;

void validate_data(std::span<const Observation> data, const ConfigurationSpace& space,
                   double kappa_max) {
  if (data.empty()) throw UnfitError("no training data");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& o = data[i];
    space.require_contains(o.theta);
    if (!std::isfinite(o.y)) {
      throw DomainError("observation " + std::to_string(i) + " has a non-finite response");
    }
    if (o.censored && o.y > kappa_max) {
      throw DomainError("observation " + std::to_string(i) + " is censored above kappa_max");
    }
  }
}

std::size_t count_uncensored(std::span<const Observation> data) {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](const Observation& o) { return !o.censored; }));
}

double mean_uncensored(std::span<const Observation> data) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : data) {
    if (!o.censored) {
      sum += o.y;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

std::vector<Configuration> inputs_of(std::span<const Observation> data) {
  std::vector<Configuration> xs;
  xs.reserve(data.size());
  for (const auto& o : data) xs.push_back(o.theta);
  return xs;
}

std::vector<double> impute_point(const PredictiveDistribution& pd, double lower, std::size_t copies,
                                 Imputation mode, double kappa_max) {
  const double sigma = pd.sd();
  std::vector<double> values;
  if (sigma <= 1e-12 * std::max(1.0, std::abs(pd.mu))) {
    // Point mass: truncation moves it up to the bound.
    values.assign(copies, std::max(pd.mu, lower));
  } else {
    const stats::TruncatedNormal d{pd.mu, sigma, lower};
    if (mode == Imputation::Stratified) {
      values = stats::stratified_samples(d, copies);
    } else {
      values.assign(copies, stats::trunc_mean(d));
    }
  }
  if (mode == Imputation::Stratified) {
    clamp_mean_to_cap(values, lower, kappa_max);
  } else {
    for (auto& v : values) v = std::min(kappa_max, v);
  }
  return values;
}

void check_imputation(const ImputedPoint& p, double kappa_max) {
  double sum = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double v = p.values[k];
    if (!std::isfinite(v)) throw InternalError("imputation produced a non-finite value");
    if (v < p.lower - kBoundSlack * std::max(1.0, std::abs(p.lower))) {
      throw InternalError("imputed value below its censoring bound");
    }
    if (k > 0 && v < p.values[k - 1]) throw InternalError("imputed values not ordered by tree");
    sum += v;
  }
  if (sum / static_cast<double>(p.values.size()) > kappa_max + kBoundSlack) {
    throw InternalError("imputed mean exceeds kappa_max");
  }
}

CensoredFitResult run_em(std::span<const Observation> data, const ConfigurationSpace& space,
                         const ForestConfig& forest_config, const CensoredFitConfig& fit_config,
                         const CensoredFitOptions& options, Imputation mode) {
  forest_config.validate();
  fit_config.validate();
  validate_data(data, space, fit_config.kappa_max);
  if (count_uncensored(data) == 0) throw UnfitError("no uncensored observations to fit");

  const std::size_t n = data.size();
  BootstrapLedger ledger = options.ledger
                               ? *options.ledger
                               : draw_bootstrap(n, forest_config.num_trees, ledger_seed(forest_config));
  if (ledger.n != n) throw DomainError("forced ledger does not match the data size");

  CensoredFitResult result{Forest(space, forest_config, std::move(ledger)), {}, 0, true};
  Forest& forest = result.forest;
  const BootstrapLedger& led = forest.ledger();
  const std::vector<Configuration> inputs = inputs_of(data);
  const double fallback = mean_uncensored(data);

  std::vector<std::vector<std::optional<double>>> rows(led.num_trees());
  for (std::size_t b = 0; b < rows.size(); ++b) {
    rows[b].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& o = data[led.assignments[b][i]];
      if (!o.censored) rows[b][i] = o.y;
    }
  }
  forest.refit_all(inputs, rows, 0, fallback);

  ImputationState& state = result.imputations;
  for (std::size_t j = 0; j < n; ++j) {
    if (data[j].censored && led.counts[j] > 0) {
      state.points.push_back(ImputedPoint{j, data[j].y, {}, {}});
    }
  }
  if (state.points.empty()) return result;

  result.converged = false;
  for (std::size_t t = 1; t <= fit_config.max_iterations; ++t) {
    ImputationState next = state;
    detail::parallel_for(next.points.size(), forest_config.threads, [&](std::size_t p) {
      ImputedPoint& point = next.points[p];
      const PredictiveDistribution pd = forest.predict(data[point.index].theta);
      if (!std::isfinite(pd.mu) || !std::isfinite(pd.var)) {
        throw InternalError("non-finite predictive distribution during EM");
      }
      point.predictive = pd;
      point.values = impute_point(pd, point.lower, led.counts[point.index], mode,
                                  fit_config.kappa_max);
      check_imputation(point, fit_config.kappa_max);
    });
    if (options.observer) options.observer(t, next);

    double change = 0.0;
    if (t > 1) {
      for (std::size_t p = 0; p < next.points.size(); ++p) {
        const auto& now = next.points[p].values;
        const auto& before = state.points[p].values;
        for (std::size_t k = 0; k < now.size(); ++k) {
          change = std::max(change,
                            std::abs(now[k] - before[k]) / std::max(1.0, std::abs(before[k])));
        }
      }
    }
    state = std::move(next);

    for (const auto& point : state.points) {
      const auto& where = led.locations[point.index];
      for (std::size_t k = 0; k < where.size(); ++k) {
        rows[where[k].tree][where[k].slot] = point.values[k];
      }
    }
    forest.refit_all(inputs, rows, t, fallback);
    result.iterations = t;
    if (t > 1 && change < fit_config.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(CensoringStrategy s) {
  switch (s) {
    case CensoringStrategy::SamplingSchmeeHahn: return "SamplingSchmeeHahn";
    case CensoringStrategy::SchmeeHahnMean: return "SchmeeHahnMean";
    case CensoringStrategy::DropCensored: return "DropCensored";
    case CensoringStrategy::TreatAsUncensored: return "TreatAsUncensored";
  }
  return "unknown";
}

CensoringStrategy parse_strategy(std::string_view name) {
  for (auto s : {CensoringStrategy::SamplingSchmeeHahn, CensoringStrategy::SchmeeHahnMean,
                 CensoringStrategy::DropCensored, CensoringStrategy::TreatAsUncensored}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError("unknown censoring strategy '" + std::string(name) + "'");
}

void CensoredFitConfig::validate() const {
  if (max_iterations < 1) throw DomainError("CensoredFitConfig: max_iterations must be >= 1");
  if (!(convergence_tol > 0.0)) throw DomainError("CensoredFitConfig: convergence_tol must be > 0");
  if (!(kappa_max > 0.0) || !std::isfinite(kappa_max)) {
    throw DomainError("CensoredFitConfig: kappa_max must be positive and finite");
  }
}

bool operator==(const ImputedPoint& a, const ImputedPoint& b) {
  return a.index == b.index && a.lower == b.lower && a.predictive.mu == b.predictive.mu &&
         a.predictive.var == b.predictive.var && a.values == b.values;
}

bool operator==(const ImputationState& a, const ImputationState& b) { return a.points == b.points; }

void clamp_mean_to_cap(std::vector<double>& v, double lower, double cap) {
  if (v.empty()) return;
  if (lower > cap) throw DomainError("clamp_mean_to_cap: lower bound above cap");
  const std::size_t n = v.size();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  if (mean <= cap) return;

  // With the c smallest values pinned at `lower`, the shift that puts the mean
  // at `cap` is delta = (c*lower + sum_{k>=c} v_k - n*cap) / (n - c).
  const double eps = 1e-12 * std::max(1.0, std::abs(lower));
  double tail = std::accumulate(v.begin(), v.end(), 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (c > 0) tail -= v[c - 1];
    const double delta =
        (static_cast<double>(c) * lower + tail - static_cast<double>(n) * cap) /
        static_cast<double>(n - c);
    const bool rest_above = v[c] - delta >= lower - eps;
    const bool pinned_below = c == 0 || v[c - 1] - delta <= lower + eps;
    if (rest_above && pinned_below) {
      for (auto& x : v) x = std::max(x - delta, lower);
      return;
    }
  }
  std::fill(v.begin(), v.end(), lower);
}

CensoredFitResult fit_censored(std::span<const Observation> data, const ConfigurationSpace& space,
                               const ForestConfig& forest_config,
                               const CensoredFitConfig& fit_config,
                               const CensoredFitOptions& options) {
  return run_em(data, space, forest_config, fit_config, options, Imputation::Stratified);
}

CensoredFitResult fit_baseline(std::span<const Observation> data, const ConfigurationSpace& space,
                               const ForestConfig& forest_config,
                               const CensoredFitConfig& fit_config,
                               const CensoredFitOptions& options) {
  switch (fit_config.strategy) {
    case CensoringStrategy::SchmeeHahnMean:
      return run_em(data, space, forest_config, fit_config, options, Imputation::Mean);
    case CensoringStrategy::DropCensored: {
      std::vector<Observation> kept;
      for (const auto& o : data) {
        if (!o.censored) kept.push_back(o);
      }
      if (kept.empty()) throw UnfitError("DropCensored: no uncensored observations");
      CensoredFitOptions plain;
      plain.ledger = options.ledger;
      return run_em(kept, space, forest_config, fit_config, plain, Imputation::Mean);
    }
    case CensoringStrategy::TreatAsUncensored: {
      std::vector<Observation> as_exact(data.begin(), data.end());
      for (auto& o : as_exact) o.censored = false;
      CensoredFitOptions plain;
      plain.ledger = options.ledger;
      return run_em(as_exact, space, forest_config, fit_config, plain, Imputation::Mean);
    }
    case CensoringStrategy::SamplingSchmeeHahn:
      break;
  }
  throw DomainError("fit_baseline: SamplingSchmeeHahn is handled by fit_censored");
}

CensoredFitResult fit_model(std::span<const Observation> data, const ConfigurationSpace& space,
                            const ForestConfig& forest_config, const CensoredFitConfig& fit_config,
                            const CensoredFitOptions& options) {
  if (fit_config.strategy == CensoringStrategy::SamplingSchmeeHahn) {
    return fit_censored(data, space, forest_config, fit_config, options);
  }
  return fit_baseline(data, space, forest_config, fit_config, options);
}

ModelScore evaluate_model(const Forest& forest, std::span<const LabeledPoint> test,
                          double var_floor) {
  if (test.empty()) throw DomainError("evaluate_model: empty test set");
  double sq = 0.0;
  double ll = 0.0;
  for (const auto& p : test) {
    const PredictiveDistribution pd = forest.predict(p.theta);
    const double err = pd.mu - p.value;
    const double var = pd.var + var_floor;
    sq += err * err;
    ll += -0.5 * std::log(var) - stats::kLogSqrt2Pi - 0.5 * err * err / var;
  }
  const double count = static_cast<double>(test.size());
  return ModelScore{std::sqrt(sq / count), ll / count};
}

double default_var_floor(std::span<const Observation> data) {
  double top = 0.0;
  for (const auto& o : data) {
    if (!o.censored) top = std::max(top, std::abs(o.y));
  }
  const double floor = 1e-6 * top * top;
  return floor > 0.0 ? floor : 1e-12;
}

}  // namespace censbo
