#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "votecast/error.hpp"
#include "votecast/rng.hpp"

namespace votecast {

using Matrix = std::vector<std::vector<double>>;  // row-major design matrix

enum class ModelKind { Linear, RandomForest, GradientBoosting };

struct RegressorSpec {
  ModelKind kind = ModelKind::Linear;
  int tree_count = 100;
  int max_depth = 8;
  int min_samples_leaf = 2;
  double learning_rate = 0.1;
  double feature_subsample_fraction = 1.0;
  bool sqrt_features = false;  // per-split count = round(sqrt(k)), overrides the fraction
  bool bootstrap = true;
  std::uint64_t seed = 0;

  static RegressorSpec linear();
  static RegressorSpec forest(std::uint64_t seed = 0);
  static RegressorSpec boosting(std::uint64_t seed = 0);
  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction
};

/// Binary regression tree; left child takes x < threshold, right x >= threshold.
struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

class FittedRegressor {
public:
  double predict(std::span<const double> x) const;
  std::size_t feature_count() const { return n_features_; }
  ModelKind kind() const { return kind_; }

  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }
  const std::vector<Tree>& trees() const { return trees_; }
  double base_prediction() const { return base_; }

private:
  friend FittedRegressor fit_linear(const Matrix&, const std::vector<double>&);
  friend FittedRegressor fit_tree(const Matrix&, const std::vector<double>&, int, int, Rng);
  friend FittedRegressor fit_forest(const Matrix&, const std::vector<double>&,
                                    const RegressorSpec&);
  friend FittedRegressor fit_boosting(const Matrix&, const std::vector<double>&,
                                      const RegressorSpec&);

  ModelKind kind_ = ModelKind::Linear;
  std::size_t n_features_ = 0;
  std::vector<double> coef_;  // linear
  double intercept_ = 0.0;
  std::vector<Tree> trees_;   // ensembles
  double base_ = 0.0;         // boosting stage-0 mean
  double stage_scale_ = 1.0;  // boosting learning rate
};

/// Least squares with intercept; rank-deficient designs get the minimum-norm
/// solution (SVD pseudo-inverse).
FittedRegressor fit_linear(const Matrix& X, const std::vector<double>& y);

/// Greedy variance-reduction tree. Thresholds at midpoints of consecutive
/// distinct sorted values; ties broken by lowest feature index, then lowest
/// threshold; leaves predict the sample mean.
FittedRegressor fit_tree(const Matrix& X, const std::vector<double>& y, int max_depth,
                         int min_samples_leaf, Rng rng = Rng(0));

FittedRegressor fit_forest(const Matrix& X, const std::vector<double>& y,
                           const RegressorSpec& spec);

FittedRegressor fit_boosting(const Matrix& X, const std::vector<double>& y,
                             const RegressorSpec& spec);

FittedRegressor fit(const Matrix& X, const std::vector<double>& y, const RegressorSpec& spec);

/// Reusable tree trainer over a fixed design matrix. Feature columns are
/// sorted once; repeated fits (walk-forward refits, ensemble members) reuse
/// the order instead of re-sorting per node.
class TreeTrainer {
public:
  TreeTrainer(const Matrix& X, std::size_t n_features);

  /// Fit one tree on rows [0, n_rows) weighted by `counts` (bootstrap
  /// multiplicities; 0 excludes a row) against targets `y`.
  Tree train(std::span<const double> y, std::span<const int> counts, std::size_t n_rows,
             int max_depth, int min_samples_leaf, double feature_fraction, bool sqrt_features,
             Rng& rng) const;

private:
  std::size_t n_features_;
  std::size_t n_rows_;
  std::vector<std::vector<double>> columns_;       // column-major copy
  std::vector<std::vector<int>> sorted_rows_;      // per-feature row order
};

}  // namespace votecast
