#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "censbo/forest.hpp"
#include "censbo/space.hpp"

namespace censbo {

/// Closed-form expected improvement over f_min for a N(mu, sigma^2) prediction.
/// sigma == 0 yields max(0, f_min - mu). Throws DomainError on non-finite
/// input or negative sigma.
double expected_improvement(double mu, double sigma, double f_min);

struct AcquisitionConfig {
  std::size_t num_random_candidates = 10000;
  std::size_t num_local_starts = 10;
  /// Gaussian probes per continuous dimension and per step size.
  std::size_t probes_per_scale = 4;
  std::size_t max_local_steps = 200;
  /// Every k-th model-based query in the BO loop is drawn uniformly at
  /// random instead (0 disables).
  std::size_t random_interleave = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AcquisitionResult {
  Configuration theta;
  double ei = 0.0;
};

/// Random scan followed by greedy one-exchange local search from the best
/// random candidates and the incumbent. On a space with a single continuous
/// dimension every cell between the forest's split thresholds is also scored,
/// so the piecewise-constant EI surface is maximized exactly.
AcquisitionResult maximize_ei(const Forest& forest, double f_min, const ConfigurationSpace& space,
                              const AcquisitionConfig& config,
                              const std::optional<Configuration>& incumbent = std::nullopt);

}  // namespace censbo
