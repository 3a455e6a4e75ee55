#pragma once

#include <cstddef>
#include <vector>

namespace censbo::stats {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal density. Throws DomainError on non-finite input.
double std_normal_pdf(double x);

/// Standard normal cdf, erfc based (absolute error ~1e-16).
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0, 1). Throws DomainError outside the open interval.
double std_normal_quantile(double p);

// Tail helpers. These accept any finite x and stay finite where the naive
// forms overflow or produce 0/0.

/// log(1 - Phi(x)).
double log_survival(double x);

/// Hazard phi(x) / (1 - Phi(x)), the inverse Mills ratio.
double hazard(double x);

/// Mills ratio (1 - Phi(x)) / phi(x) by continued fraction; intended for x >= 6.
double mills_ratio_cf(double x);

/// Normal N(mu, sigma^2) restricted to [lower, inf).
struct TruncatedNormal {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;

  /// Checks sigma > 0 and finiteness; throws DomainError.
  void validate() const;

  /// Standardized truncation point (lower - mu) / sigma.
  double alpha() const { return (lower - mu) / sigma; }
};

double trunc_pdf(const TruncatedNormal& d, double x);
double trunc_cdf(const TruncatedNormal& d, double x);
double trunc_mean(const TruncatedNormal& d);
double trunc_variance(const TruncatedNormal& d);
double trunc_quantile(const TruncatedNormal& d, double p);

/// The k/(n+1) quantiles, k = 1..n, in increasing order.
std::vector<double> stratified_samples(const TruncatedNormal& d, std::size_t n);

}  // namespace censbo::stats
