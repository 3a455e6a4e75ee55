#include "censbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <utility>

#include "censbo/error.hpp"
#include "censbo/random.hpp"
#include "censbo/stats.hpp"

namespace censbo {
namespace {

constexpr double kUnderflowCutoff = -37.0;

struct Scored {
  Configuration theta;
  double ei = 0.0;
};

double ei_at(const Forest& forest, const Configuration& theta, double f_min) {
  const PredictiveDistribution pd = forest.predict(theta);
  return expected_improvement(pd.mu, pd.sd(), f_min);
}

std::vector<Configuration> neighbours(const Configuration& theta, const ConfigurationSpace& space,
                                      const AcquisitionConfig& config, Rng& rng) {
  static constexpr double kScales[] = {0.2, 0.05};
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Configuration> out;
  for (std::size_t d = 0; d < space.size(); ++d) {
    if (const auto* c = std::get_if<Continuous>(&space[d])) {
      const double range = c->high - c->low;
      for (double scale : kScales) {
        for (std::size_t p = 0; p < config.probes_per_scale; ++p) {
          Configuration next = theta;
          next[d] = std::clamp(theta[d] + scale * range * gauss(rng), c->low, c->high);
          if (next[d] != theta[d]) out.push_back(std::move(next));
        }
      }
    } else {
      const auto levels = std::get<Categorical>(space[d]).num_levels;
      for (std::size_t l = 0; l < levels; ++l) {
        if (static_cast<double>(l) == theta[d]) continue;
        Configuration next = theta;
        next[d] = static_cast<double>(l);
        out.push_back(std::move(next));
      }
    }
  }
  return out;
}

Scored local_search(const Forest& forest, double f_min, const ConfigurationSpace& space,
                    const AcquisitionConfig& config, Scored start, Rng& rng) {
  for (std::size_t step = 0; step < config.max_local_steps; ++step) {
    Scored best_move = start;
    for (auto& cand : neighbours(start.theta, space, config, rng)) {
      const double ei = ei_at(forest, cand, f_min);
      if (ei > best_move.ei) best_move = Scored{std::move(cand), ei};
    }
    if (!(best_move.ei > start.ei)) break;
    start = std::move(best_move);
  }
  return start;
}

// Leaves of a tree over one continuous dimension, left to right: leaf k holds
// the points in (upper[k-1], upper[k]].
struct LeafIntervals {
  std::vector<double> upper;
  std::vector<double> value;
};

LeafIntervals leaf_intervals_1d(const RegressionTree& tree) {
  LeafIntervals out;
  const auto& nodes = tree.nodes();
  std::vector<std::pair<std::size_t, double>> stack{{0, std::numeric_limits<double>::infinity()}};
  while (!stack.empty()) {
    const auto [at, hi] = stack.back();
    stack.pop_back();
    const TreeNode& node = nodes[at];
    if (node.is_leaf()) {
      out.upper.push_back(hi);
      out.value.push_back(node.value);
      continue;
    }
    stack.emplace_back(static_cast<std::size_t>(node.right), hi);
    stack.emplace_back(static_cast<std::size_t>(node.left), node.threshold);
  }
  return out;
}

// Scores the midpoint of every cell cut out of a 1-D continuous domain by the
// split thresholds of all trees, sweeping the cells left to right.
void score_cells_1d(const Forest& forest, const Continuous& dim, double f_min,
                    std::vector<Scored>& out) {
  std::vector<double> cuts{dim.low, dim.high};
  std::vector<LeafIntervals> leaves;
  leaves.reserve(forest.num_trees());
  for (const auto& tree : forest.trees()) {
    leaves.push_back(leaf_intervals_1d(tree));
    for (double t : leaves.back().upper) {
      if (t > dim.low && t < dim.high) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::size_t> cursor(leaves.size(), 0);
  std::vector<double> per_tree(leaves.size());
  const double count = static_cast<double>(leaves.size());
  auto score = [&](double x) {
    double sum = 0.0;
    for (std::size_t b = 0; b < leaves.size(); ++b) {
      std::size_t& k = cursor[b];
      while (x > leaves[b].upper[k]) ++k;
      per_tree[b] = leaves[b].value[k];
      sum += per_tree[b];
    }
    const double mu = sum / count;
    double sq = 0.0;
    for (double v : per_tree) sq += (v - mu) * (v - mu);
    const PredictiveDistribution pd{mu, sq / count};
    out.push_back(Scored{Configuration{x}, expected_improvement(pd.mu, pd.sd(), f_min)});
  };
  score(dim.low);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) score(cuts[i] + 0.5 * (cuts[i + 1] - cuts[i]));
}

}  // namespace

double expected_improvement(double mu, double sigma, double f_min) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(f_min)) {
    throw DomainError("expected_improvement: non-finite input");
  }
  if (sigma < 0.0) throw DomainError("expected_improvement: negative sigma");
  if (sigma == 0.0) return std::max(0.0, f_min - mu);

  const double u = (f_min - mu) / sigma;
  if (u < kUnderflowCutoff) return 0.0;
  if (u > -6.0) {
    return std::max(0.0, sigma * (u * stats::std_normal_cdf(u) + stats::std_normal_pdf(u)));
  }
  // u * Phi(u) + phi(u) = phi(x) * (1 - x R(x)) with x = -u and R the Mills
  // ratio; 1 - x R(x) = c / (x + c) where 1/R(x) = x + c, avoiding the cancellation.
  const double x = -u;
  const double c = 1.0 / stats::mills_ratio_cf(x) - x;
  return sigma * stats::std_normal_pdf(x) * c / (x + c);
}

void AcquisitionConfig::validate() const {
  if (num_random_candidates < 1) {
    throw DomainError("AcquisitionConfig: num_random_candidates must be >= 1");
  }
}

AcquisitionResult maximize_ei(const Forest& forest, double f_min, const ConfigurationSpace& space,
                              const AcquisitionConfig& config,
                              const std::optional<Configuration>& incumbent) {
  config.validate();
  if (!std::isfinite(f_min)) throw DomainError("maximize_ei: f_min must be finite");
  Rng rng(derive_seed(config.seed, {stream::kAcquisition}));

  std::vector<Scored> candidates;
  candidates.reserve(config.num_random_candidates);
  for (std::size_t i = 0; i < config.num_random_candidates; ++i) {
    Configuration theta = space.sample_uniform(rng);
    const double ei = ei_at(forest, theta, f_min);
    candidates.push_back(Scored{std::move(theta), ei});
  }
  if (space.size() == 1 && !space.is_categorical(0)) {
    score_cells_1d(forest, std::get<Continuous>(space[0]), f_min, candidates);
  }

  // Best first; equal EI keeps generation order.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].ei > candidates[b].ei;
  });

  Scored best = candidates[order.front()];
  std::vector<Scored> starts;
  for (std::size_t k = 0; k < std::min(config.num_local_starts, order.size()); ++k) {
    starts.push_back(candidates[order[k]]);
  }
  if (incumbent && space.contains(*incumbent)) {
    starts.push_back(Scored{*incumbent, ei_at(forest, *incumbent, f_min)});
  }
  for (auto& s : starts) {
    Scored found = local_search(forest, f_min, space, config, std::move(s), rng);
    if (found.ei > best.ei) best = std::move(found);
  }
  return AcquisitionResult{std::move(best.theta), best.ei};
}

}  // namespace censbo
