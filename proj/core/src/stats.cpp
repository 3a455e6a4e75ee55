#include "censbo/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "censbo/error.hpp"

namespace censbo::stats {
namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kLog2Pi = 1.83787706640934548356;

// Past this point erfc-based survival loses too many digits to denormals.
constexpr double kSurvivalCfCutover = 30.0;
constexpr double kHazardCfCutover = 6.0;
constexpr int kCfTerms = 200;
// From here on 40 terms already match the full fraction to the last bit.
constexpr double kShortCfFrom = 5.0;
constexpr int kShortCfTerms = 40;

void require_finite(double x, const char* op) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(op) + ": non-finite argument");
  }
}

double survival(double x) { return 0.5 * std::erfc(x * kSqrt1_2); }

// Backward evaluation of the Mills-ratio continued fraction
//   R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))),
// returning the denominator tail starting at `first_term`:
//   first_term = 1 -> x + 1/(x + 2/(...))  (= 1/R)
//   first_term = 2 -> x + 2/(x + 3/(...))
double cf_tail(double x, int first_term) {
  double t = x;
  const int terms = x >= kShortCfFrom ? kShortCfTerms : kCfTerms;
  for (int k = terms; k >= first_term; --k) t = x + k / t;
  return t;
}

// Acklam's rational approximation to the lower-tail quantile, |rel err| < 1.2e-9.
double acklam_quantile(double p) {
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solves log(1 - Phi(x)) = log_s for x >= 0 (log_s <= log 0.5). Newton on the
// log survival function, whose derivative is -hazard(x).
double upper_quantile_from_log_survival(double log_s) {
  double x;
  if (log_s > -700.0) {
    x = -acklam_quantile(std::exp(log_s));
  } else {
    const double l = -2.0 * log_s;
    x = std::sqrt(l - std::log(l) - kLog2Pi);
  }
  for (int it = 0; it < 60; ++it) {
    const double step = (log_survival(x) - log_s) / hazard(x);
    x += step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x * kSqrt1_2);
}

double mills_ratio_cf(double x) { return 1.0 / cf_tail(x, 1); }

double log_survival(double x) {
  require_finite(x, "log_survival");
  if (x < kSurvivalCfCutover) return std::log(survival(x));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio_cf(x));
}

double hazard(double x) {
  require_finite(x, "hazard");
  if (x < kHazardCfCutover) {
    const double s = survival(x);
    return kInvSqrt2Pi * std::exp(-0.5 * x * x) / s;
  }
  return cf_tail(x, 1);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -upper_quantile_from_log_survival(std::log(p));
  return upper_quantile_from_log_survival(std::log(1.0 - p));
}

void TruncatedNormal::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(lower)) {
    throw DomainError("TruncatedNormal: fields must be finite");
  }
  if (!(sigma > 0.0)) throw DomainError("TruncatedNormal: sigma must be positive");
}

double trunc_pdf(const TruncatedNormal& d, double x) {
  d.validate();
  if (x < d.lower) return 0.0;
  const double z = (x - d.mu) / d.sigma;
  return std::exp(-0.5 * z * z - kLogSqrt2Pi - log_survival(d.alpha())) / d.sigma;
}

double trunc_cdf(const TruncatedNormal& d, double x) {
  d.validate();
  if (x <= d.lower) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  const double z = (x - d.mu) / d.sigma;
  return -std::expm1(log_survival(z) - log_survival(d.alpha()));
}

double trunc_mean(const TruncatedNormal& d) {
  d.validate();
  return std::max(d.lower, d.mu + d.sigma * hazard(d.alpha()));
}

double trunc_variance(const TruncatedNormal& d) {
  d.validate();
  const double a = d.alpha();
  double shrink;
  if (a < kHazardCfCutover) {
    const double lambda = hazard(a);
    shrink = 1.0 + a * lambda - lambda * lambda;
  } else {
    // lambda = a + delta with delta = 1 / cf_tail(a, 2); 1 + a*lambda - lambda^2 = 1 - lambda*delta.
    const double delta = 1.0 / cf_tail(a, 2);
    shrink = 1.0 - (a + delta) * delta;
  }
  return d.sigma * d.sigma * std::max(0.0, shrink);
}

double trunc_quantile(const TruncatedNormal& d, double p) {
  d.validate();
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("trunc_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  const double a = d.alpha();
  double z;
  if (a < 0.0) {
    const double target = std_normal_cdf(a) + p * survival(a);
    z = target <= 0.5 ? std_normal_quantile(target)
                      : upper_quantile_from_log_survival(std::log1p(-p) + log_survival(a));
  } else {
    z = upper_quantile_from_log_survival(std::log1p(-p) + log_survival(a));
  }
  return std::max(d.lower, d.mu + d.sigma * z);
}

std::vector<double> stratified_samples(const TruncatedNormal& d, std::size_t n) {
  if (n == 0) throw DomainError("stratified_samples: n must be at least 1");
  d.validate();
  std::vector<double> out;
  out.reserve(n);
  const double denom = static_cast<double>(n) + 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    out.push_back(trunc_quantile(d, static_cast<double>(k) / denom));
  }
  return out;
}

}  // namespace censbo::stats
