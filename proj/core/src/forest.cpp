#include "censbo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "censbo/error.hpp"
#include "censbo/random.hpp"
#include "parallel.hpp"

namespace censbo {
namespace {

// Exhaustive categorical partition search up to this many levels.
constexpr std::size_t kExhaustiveLevelLimit = 10;

struct SplitCandidate {
  double score = std::numeric_limits<double>::infinity();
  std::size_t dim = 0;
  bool categorical = false;
  // continuous: open gap (low, high) between adjacent distinct values
  double low = 0.0;
  double high = 0.0;
  std::vector<std::uint8_t> left_levels;
};

struct LevelStats {
  std::size_t level = 0;
  std::size_t count = 0;
  double sum = 0.0;
  double sumsq = 0.0;
};

double sse_of(std::size_t count, double sum, double sumsq) {
  if (count == 0) return 0.0;
  return std::max(0.0, sumsq - sum * sum / static_cast<double>(count));
}

class TreeBuilder {
 public:
  TreeBuilder(const ConfigurationSpace& space, std::vector<std::vector<double>> columns,
              std::vector<double> responses, const ForestConfig& config, std::uint64_t seed)
      : space_(space),
        responses_(std::move(responses)),
        min_leaf_(config.min_leaf_size),
        fraction_(config.split_candidate_fraction),
        rng_(seed),
        columns_(std::move(columns)) {
    const std::size_t n = responses_.size();
    members_.resize(n);
    std::iota(members_.begin(), members_.end(), 0u);
    sorted_.resize(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (space.is_categorical(k)) continue;
      const auto& column = columns_[k];
      auto& order = sorted_[k];
      order = members_;
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return column[a] < column[b] || (column[a] == column[b] && a < b);
      });
    }
    goes_left_.resize(n);
    scratch_.resize(n);
  }

  RegressionTree build() {
    grow(0, responses_.size());
    return RegressionTree(std::move(nodes_));
  }

 private:
  std::int32_t grow(std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t p = begin; p < end; ++p) {
      const double y = responses_[members_[p]];
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const double mean = sum / static_cast<double>(n);

    const auto id = static_cast<std::int32_t>(nodes_.size());
    TreeNode node;
    node.value = mean;
    node.count = static_cast<std::uint32_t>(n);
    nodes_.push_back(std::move(node));

    const bool pure = hi - lo <= 1e-12 * std::max(1.0, std::abs(mean));
    if (pure || n < 2 * min_leaf_) return id;

    double node_sse = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
      const double r = responses_[members_[p]] - mean;
      node_sse += r * r;
    }

    SplitCandidate best;
    const double tol = 1e-12 * node_sse;
    for (std::size_t dim : candidate_dims()) {
      if (space_.is_categorical(dim)) {
        scan_categorical(begin, end, dim, mean, tol, best);
      } else {
        scan_continuous(begin, end, dim, mean, tol, best);
      }
    }
    if (!std::isfinite(best.score)) return id;

    const auto& column = columns_[best.dim];
    TreeNode& split = nodes_[static_cast<std::size_t>(id)];
    split.dim = static_cast<std::uint32_t>(best.dim);
    std::size_t num_left = 0;
    if (best.categorical) {
      for (std::size_t p = begin; p < end; ++p) {
        const auto i = members_[p];
        goes_left_[i] = best.left_levels[static_cast<std::size_t>(column[i])];
        num_left += goes_left_[i];
      }
      split.left_levels = std::move(best.left_levels);
    } else {
      double t = best.low + uniform01(rng_) * (best.high - best.low);
      if (!(t < best.high)) t = best.low;
      for (std::size_t p = begin; p < end; ++p) {
        const auto i = members_[p];
        goes_left_[i] = column[i] <= t ? 1 : 0;
        num_left += goes_left_[i];
      }
      split.threshold = t;
    }
    partition(members_, begin, end);
    for (std::size_t k = 0; k < sorted_.size(); ++k) {
      if (!sorted_[k].empty()) partition(sorted_[k], begin, end);
    }

    const std::int32_t l = grow(begin, begin + num_left);
    const std::int32_t r = grow(begin + num_left, end);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  // Stable partition of [begin, end) by goes_left_.
  void partition(std::vector<std::uint32_t>& order, std::size_t begin, std::size_t end) {
    std::size_t out = begin;
    std::size_t spill = 0;
    for (std::size_t p = begin; p < end; ++p) {
      const auto i = order[p];
      if (goes_left_[i]) {
        order[out++] = i;
      } else {
        scratch_[spill++] = i;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill),
              order.begin() + static_cast<std::ptrdiff_t>(out));
  }

  std::vector<std::size_t> candidate_dims() {
    const std::size_t d = space_.size();
    std::vector<std::size_t> dims(d);
    std::iota(dims.begin(), dims.end(), std::size_t{0});
    if (fraction_ >= 1.0) return dims;
    const auto k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction_ * static_cast<double>(d))), 1, d);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_() % (d - i));
      std::swap(dims[i], dims[j]);
    }
    dims.resize(k);
    std::sort(dims.begin(), dims.end());
    return dims;
  }

  void scan_continuous(std::size_t begin, std::size_t end, std::size_t dim, double mean,
                       double tol, SplitCandidate& best) {
    const auto& column = columns_[dim];
    const std::uint32_t* order = sorted_[dim].data() + begin;
    const std::size_t n = end - begin;
    double total = 0.0;
    double total_sq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double r = responses_[order[p]] - mean;
      total += r;
      total_sq += r * r;
    }
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double r = responses_[order[k - 1]] - mean;
      left_sum += r;
      left_sq += r * r;
      if (k < min_leaf_ || n - k < min_leaf_) continue;
      const double a = column[order[k - 1]];
      const double b = column[order[k]];
      if (!(a < b)) continue;
      const double score = sse_of(k, left_sum, left_sq) +
                           sse_of(n - k, total - left_sum, total_sq - left_sq);
      if (score < best.score - tol) {
        best.score = score;
        best.dim = dim;
        best.categorical = false;
        best.low = a;
        best.high = b;
      }
    }
  }

  void scan_categorical(std::size_t begin, std::size_t end, std::size_t dim, double mean,
                        double tol, SplitCandidate& best) {
    const auto& column = columns_[dim];
    const std::size_t levels = std::get<Categorical>(space_[dim]).num_levels;
    std::vector<LevelStats> stats(levels);
    for (std::size_t l = 0; l < levels; ++l) stats[l].level = l;
    for (std::size_t p = begin; p < end; ++p) {
      const auto i = members_[p];
      auto& s = stats[static_cast<std::size_t>(column[i])];
      const double r = responses_[i] - mean;
      ++s.count;
      s.sum += r;
      s.sumsq += r * r;
    }
    std::vector<LevelStats> present;
    for (const auto& s : stats) {
      if (s.count > 0) present.push_back(s);
    }
    const std::size_t k = present.size();
    if (k < 2) return;

    auto consider = [&](auto&& in_left) {
      LevelStats l;
      LevelStats r;
      for (std::size_t p = 0; p < k; ++p) {
        auto& side = in_left(p) ? l : r;
        side.count += present[p].count;
        side.sum += present[p].sum;
        side.sumsq += present[p].sumsq;
      }
      if (l.count < min_leaf_ || r.count < min_leaf_) return;
      const double score = sse_of(l.count, l.sum, l.sumsq) + sse_of(r.count, r.sum, r.sumsq);
      if (!(score < best.score - tol)) return;
      best.score = score;
      best.dim = dim;
      best.categorical = true;
      // Levels unseen at this node follow the larger child.
      best.left_levels.assign(levels, l.count >= r.count ? 1 : 0);
      for (std::size_t p = 0; p < k; ++p) {
        best.left_levels[present[p].level] = in_left(p) ? 1 : 0;
      }
    };

    if (levels <= kExhaustiveLevelLimit) {
      // The last present level stays right; every other subset goes left once.
      const std::uint32_t limit = (1u << (k - 1)) - 1u;
      for (std::uint32_t mask = 1; mask <= limit; ++mask) {
        consider([mask](std::size_t p) { return ((mask >> p) & 1u) != 0; });
      }
    } else {
      std::stable_sort(present.begin(), present.end(), [](const LevelStats& a, const LevelStats& b) {
        return a.sum / static_cast<double>(a.count) < b.sum / static_cast<double>(b.count);
      });
      for (std::size_t cut = 1; cut < k; ++cut) {
        consider([cut](std::size_t p) { return p < cut; });
      }
    }
  }

  const ConfigurationSpace& space_;
  std::vector<double> responses_;
  std::size_t min_leaf_;
  double fraction_;
  Rng rng_;
  std::vector<std::vector<double>> columns_;
  // Node samples occupy the same [begin, end) range in members_ and in every
  // continuous dimension's presorted order.
  std::vector<std::uint32_t> members_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

void ForestConfig::validate() const {
  if (num_trees < 1) throw DomainError("ForestConfig: num_trees must be >= 1");
  if (min_leaf_size < 1) throw DomainError("ForestConfig: min_leaf_size must be >= 1");
  if (!(split_candidate_fraction > 0.0 && split_candidate_fraction <= 1.0)) {
    throw DomainError("ForestConfig: split_candidate_fraction must lie in (0, 1]");
  }
}

double PredictiveDistribution::sd() const { return std::sqrt(std::max(0.0, var)); }

BootstrapLedger BootstrapLedger::from_assignments(
    std::size_t n, std::vector<std::vector<std::uint32_t>> assignments) {
  if (n == 0) throw DomainError("BootstrapLedger: n must be >= 1");
  BootstrapLedger ledger;
  ledger.n = n;
  ledger.counts.assign(n, 0);
  ledger.locations.assign(n, {});
  for (std::size_t b = 0; b < assignments.size(); ++b) {
    if (assignments[b].size() != n) {
      throw DomainError("BootstrapLedger: row " + std::to_string(b) + " has " +
                        std::to_string(assignments[b].size()) + " slots, expected " +
                        std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t j = assignments[b][i];
      if (j >= n) throw DomainError("BootstrapLedger: data index out of range");
      ++ledger.counts[j];
      ledger.locations[j].push_back(
          SlotRef{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(i)});
    }
  }
  ledger.assignments = std::move(assignments);
  return ledger;
}

void BootstrapLedger::check_invariants() const {
  std::size_t total = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    total += counts[j];
    if (locations[j].size() != counts[j]) {
      throw InternalError("BootstrapLedger: locations/counts mismatch");
    }
    for (const auto& ref : locations[j]) {
      if (assignments.at(ref.tree).at(ref.slot) != j) {
        throw InternalError("BootstrapLedger: location does not point at its data index");
      }
    }
  }
  if (total != n * assignments.size()) {
    throw InternalError("BootstrapLedger: counts do not sum to n * B");
  }
}

BootstrapLedger draw_bootstrap(std::size_t n, std::size_t num_trees, std::uint64_t seed) {
  if (n == 0 || num_trees == 0) {
    throw DomainError("draw_bootstrap: n and number of trees must be >= 1");
  }
  Rng rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::vector<std::vector<std::uint32_t>> rows(num_trees, std::vector<std::uint32_t>(n));
  for (auto& row : rows) {
    for (auto& j : row) j = pick(rng);
  }
  return BootstrapLedger::from_assignments(n, std::move(rows));
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DomainError("RegressionTree: no nodes");
  const auto size = static_cast<std::int32_t>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    if (node.left <= 0 || node.right <= 0 || node.left >= size || node.right >= size) {
      throw DomainError("RegressionTree: child index out of range");
    }
  }
}

RegressionTree RegressionTree::constant(double value, std::uint32_t count) {
  TreeNode leaf;
  leaf.value = value;
  leaf.count = count;
  return RegressionTree(std::vector<TreeNode>{leaf});
}

double RegressionTree::predict(const Configuration& theta) const {
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const TreeNode& node = nodes_[at];
    const double v = theta[node.dim];
    bool go_left;
    if (node.left_levels.empty()) {
      go_left = v <= node.threshold;
    } else {
      const auto level = static_cast<std::size_t>(v);
      go_left = level < node.left_levels.size() && node.left_levels[level] != 0;
    }
    at = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return nodes_[at].value;
}

std::size_t RegressionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children are always stored after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

RegressionTree fit_tree(const ConfigurationSpace& space, std::span<const Configuration> inputs,
                        std::span<const double> responses, const ForestConfig& config,
                        std::uint64_t seed) {
  if (inputs.empty()) throw DomainError("fit_tree: no training points");
  if (inputs.size() != responses.size()) {
    throw DomainError("fit_tree: inputs and responses differ in length");
  }
  for (double y : responses) {
    if (!std::isfinite(y)) throw DomainError("fit_tree: non-finite response");
  }
  std::vector<std::vector<double>> columns(space.size(), std::vector<double>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    space.require_contains(inputs[i]);
    for (std::size_t k = 0; k < space.size(); ++k) columns[k][i] = inputs[i][k];
  }
  return TreeBuilder(space, std::move(columns), std::vector<double>(responses.begin(), responses.end()),
                     config, seed)
      .build();
}

Forest::Forest(ConfigurationSpace space, ForestConfig config, BootstrapLedger ledger)
    : space_(std::move(space)), config_(config), ledger_(std::move(ledger)) {
  config_.validate();
  if (ledger_.num_trees() != config_.num_trees) {
    throw DomainError("Forest: ledger has " + std::to_string(ledger_.num_trees()) +
                      " rows but num_trees is " + std::to_string(config_.num_trees));
  }
  trees_.assign(config_.num_trees, RegressionTree::constant(0.0));
}

Forest::Forest(ConfigurationSpace space, ForestConfig config, std::vector<RegressionTree> trees)
    : space_(std::move(space)), config_(config), trees_(std::move(trees)) {
  if (trees_.empty()) throw DomainError("Forest: no trees");
  config_.num_trees = trees_.size();
  config_.validate();
}

PredictiveDistribution Forest::predict(const Configuration& theta) const {
  space_.require_contains(theta);
  thread_local std::vector<double> per_tree;
  per_tree.resize(trees_.size());
  double sum = 0.0;
  for (std::size_t b = 0; b < trees_.size(); ++b) {
    per_tree[b] = trees_[b].predict(theta);
    sum += per_tree[b];
  }
  const double count = static_cast<double>(trees_.size());
  const double mu = sum / count;
  double sq = 0.0;
  for (double v : per_tree) sq += (v - mu) * (v - mu);
  return PredictiveDistribution{mu, sq / count};
}

void Forest::predict_per_tree(const Configuration& theta, std::vector<double>& out) const {
  space_.require_contains(theta);
  out.resize(trees_.size());
  for (std::size_t b = 0; b < trees_.size(); ++b) out[b] = trees_[b].predict(theta);
}

void Forest::refit_tree(std::size_t b, std::span<const Configuration> inputs,
                        std::span<const std::optional<double>> slot_responses,
                        std::uint64_t iteration, std::optional<double> empty_row_value) {
  if (b >= trees_.size()) throw DomainError("refit_tree: tree index out of range");
  if (ledger_.num_trees() == 0) throw DomainError("refit_tree: forest has no bootstrap ledger");
  if (inputs.size() != ledger_.n || slot_responses.size() != ledger_.n) {
    throw DomainError("refit_tree: expected " + std::to_string(ledger_.n) +
                      " inputs and slot responses, got " + std::to_string(inputs.size()) +
                      " and " + std::to_string(slot_responses.size()));
  }
  const auto& row = ledger_.assignments[b];
  const std::size_t d = space_.size();
  std::vector<std::vector<double>> columns(d);
  std::vector<double> ys;
  for (auto& c : columns) c.reserve(row.size());
  ys.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!slot_responses[i]) continue;
    const auto& x = inputs[row[i]];
    space_.require_contains(x);
    for (std::size_t k = 0; k < d; ++k) columns[k].push_back(x[k]);
    if (!std::isfinite(*slot_responses[i])) throw DomainError("refit_tree: non-finite response");
    ys.push_back(*slot_responses[i]);
  }
  if (ys.empty()) {
    if (!empty_row_value) {
      throw UnfitError("refit_tree: tree " + std::to_string(b) + " has no usable slots");
    }
    trees_[b] = RegressionTree::constant(*empty_row_value);
    return;
  }
  trees_[b] = TreeBuilder(space_, std::move(columns), std::move(ys), config_,
                          derive_seed(config_.seed, {stream::kTree, b, iteration}))
                  .build();
}

void Forest::refit_all(std::span<const Configuration> inputs,
                       const std::vector<std::vector<std::optional<double>>>& rows,
                       std::uint64_t iteration, std::optional<double> empty_row_value) {
  if (rows.size() != trees_.size()) throw DomainError("refit_all: one row per tree required");
  detail::parallel_for(trees_.size(), config_.threads, [&](std::size_t b) {
    refit_tree(b, inputs, rows[b], iteration, empty_row_value);
  });
}

void Forest::set_tree(std::size_t b, RegressionTree tree) { trees_.at(b) = std::move(tree); }

std::uint64_t ledger_seed(const ForestConfig& config) {
  return derive_seed(config.seed, {stream::kBootstrap});
}

Forest fit_forest(const ConfigurationSpace& space, std::span<const Configuration> inputs,
                  std::span<const double> responses, const ForestConfig& config) {
  config.validate();
  if (inputs.empty()) throw UnfitError("fit_forest: no training data");
  if (inputs.size() != responses.size()) {
    throw DomainError("fit_forest: inputs and responses differ in length");
  }
  Forest forest(space, config, draw_bootstrap(inputs.size(), config.num_trees, ledger_seed(config)));
  std::vector<std::optional<double>> row(inputs.size());
  std::vector<std::vector<std::optional<double>>> rows(config.num_trees);
  for (std::size_t b = 0; b < config.num_trees; ++b) {
    const auto& assign = forest.ledger().assignments[b];
    for (std::size_t i = 0; i < assign.size(); ++i) row[i] = responses[assign[i]];
    rows[b] = row;
  }
  forest.refit_all(inputs, rows, 0);
  return forest;
}

}  // namespace censbo
