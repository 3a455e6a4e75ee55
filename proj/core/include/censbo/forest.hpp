#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "censbo/space.hpp"

namespace censbo {

struct ForestConfig {
  std::size_t num_trees = 1000;
  std::size_t min_leaf_size = 1;
  /// Fraction of dimensions offered as split candidates at each node.
  double split_candidate_fraction = 1.0;
  std::uint64_t seed = 0;
  /// Worker threads for per-tree fitting; 0 picks the hardware concurrency.
  std::size_t threads = 1;

  void validate() const;
};

/// Gaussian summary of the per-tree predictions at one input.
struct PredictiveDistribution {
  double mu = 0.0;
  double var = 0.0;

  double sd() const;
};

/// Where one bootstrap copy of a data point lives: tree index and slot index.
struct SlotRef {
  std::uint32_t tree = 0;
  std::uint32_t slot = 0;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

/// Resampling bookkeeping shared by every EM iteration. Row b lists, for each
/// of the n slots of tree b, the original data index that fills it.
struct BootstrapLedger {
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> assignments;
  /// counts[j] = number of copies of point j across all trees.
  std::vector<std::uint32_t> counts;
  /// locations[j] lists the copies of point j in (tree, slot) order.
  std::vector<std::vector<SlotRef>> locations;

  std::size_t num_trees() const { return assignments.size(); }

  /// Derives counts and locations from explicit assignments. Throws
  /// DomainError on ragged rows or out-of-range indices.
  static BootstrapLedger from_assignments(std::size_t n,
                                          std::vector<std::vector<std::uint32_t>> assignments);

  /// Throws InternalError if counts or locations disagree with assignments.
  void check_invariants() const;
};

/// n * B uniform draws with replacement. Deterministic given seed.
BootstrapLedger draw_bootstrap(std::size_t n, std::size_t num_trees, std::uint64_t seed);

/// Flat node storage; the root is node 0. A node is a leaf when left < 0.
struct TreeNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t dim = 0;
  /// Continuous split: x <= threshold goes left.
  double threshold = 0.0;
  /// Categorical split: left_levels[level] != 0 goes left.
  std::vector<std::uint8_t> left_levels;
  /// Mean training response of the node; the prediction at leaves.
  double value = 0.0;
  std::uint32_t count = 0;

  bool is_leaf() const { return left < 0; }
};

class RegressionTree {
 public:
  RegressionTree() : RegressionTree(std::vector<TreeNode>{TreeNode{}}) {}
  /// Throws DomainError on dangling child indices or an empty node list.
  explicit RegressionTree(std::vector<TreeNode> nodes);

  static RegressionTree constant(double value, std::uint32_t count = 0);

  double predict(const Configuration& theta) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t num_leaves() const;
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

/// Grows one tree to purity, subject to min_leaf_size, greedily minimizing the
/// summed within-child squared error. For continuous dimensions the split
/// point is drawn uniformly from the best gap between adjacent distinct values.
RegressionTree fit_tree(const ConfigurationSpace& space, std::span<const Configuration> inputs,
                        std::span<const double> responses, const ForestConfig& config,
                        std::uint64_t seed);

class Forest {
 public:
  /// All trees start as constant-zero placeholders.
  Forest(ConfigurationSpace space, ForestConfig config, BootstrapLedger ledger);
  /// A forest without resampling history (e.g. loaded from JSON). Cannot be refit.
  Forest(ConfigurationSpace space, ForestConfig config, std::vector<RegressionTree> trees);

  PredictiveDistribution predict(const Configuration& theta) const;
  void predict_per_tree(const Configuration& theta, std::vector<double>& out) const;

  /// Refit tree b on its ledger row. slot_responses[i] is the response used for
  /// slot i, or nullopt to leave the slot out. Randomness comes from
  /// (seed, b, iteration). If every slot is left out, the tree becomes a
  /// constant leaf at empty_row_value, or UnfitError is thrown when none.
  void refit_tree(std::size_t b, std::span<const Configuration> inputs,
                  std::span<const std::optional<double>> slot_responses, std::uint64_t iteration,
                  std::optional<double> empty_row_value = std::nullopt);

  /// Refits every tree; rows[b] holds tree b's slot responses. Runs on
  /// config().threads workers.
  void refit_all(std::span<const Configuration> inputs,
                 const std::vector<std::vector<std::optional<double>>>& rows,
                 std::uint64_t iteration, std::optional<double> empty_row_value = std::nullopt);

  void set_tree(std::size_t b, RegressionTree tree);

  std::size_t num_trees() const { return trees_.size(); }
  const RegressionTree& tree(std::size_t b) const { return trees_.at(b); }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  const BootstrapLedger& ledger() const { return ledger_; }
  const ForestConfig& config() const { return config_; }
  const ConfigurationSpace& space() const { return space_; }

 private:
  ConfigurationSpace space_;
  ForestConfig config_;
  BootstrapLedger ledger_;
  std::vector<RegressionTree> trees_;
};

/// Plain bagged fit: draws a ledger from the config seed and fits every tree
/// on its full bootstrap row.
Forest fit_forest(const ConfigurationSpace& space, std::span<const Configuration> inputs,
                  std::span<const double> responses, const ForestConfig& config);

/// Seed of the ledger drawn by fit_forest and by the censored fits.
std::uint64_t ledger_seed(const ForestConfig& config);

}  // namespace censbo
