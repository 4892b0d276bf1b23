#include "votecast/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace votecast {

namespace {

void check_training_input(const Matrix& X, const std::vector<double>& y) {
  if (y.empty() || X.size() != y.size()) {
    raise(Errc::EmptyDataset, "need matching, non-empty X and y (rows=" +
                                  std::to_string(X.size()) + ", targets=" +
                                  std::to_string(y.size()) + ")");
  }
  const std::size_t k = X.front().size();
  for (const auto& row : X) {
    if (row.size() != k) raise(Errc::DimensionMismatch, "ragged design matrix");
    for (double v : row) {
      if (!std::isfinite(v)) raise(Errc::NonFiniteInput, "non-finite feature value");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) raise(Errc::NonFiniteInput, "non-finite target value");
  }
}

// Minimum-norm least squares via one-sided Jacobi SVD. `cols` is destroyed.
std::vector<double> svd_least_squares(std::vector<std::vector<double>> cols,
                                      const std::vector<double>& b) {
  const std::size_t m = cols.size();
  const std::size_t n = b.size();
  std::vector<std::vector<double>> v(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 60; ++sweep) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          alpha += cols[i][r] * cols[i][r];
          beta += cols[j][r] * cols[j][r];
          gamma += cols[i][r] * cols[j][r];
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        const double rel = std::abs(gamma) / std::sqrt(alpha * beta);
        worst = std::max(worst, rel);
        if (rel < 1e-14) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < n; ++r) {
          const double a = cols[i][r], d = cols[j][r];
          cols[i][r] = c * a - s * d;
          cols[j][r] = s * a + c * d;
        }
        for (std::size_t r = 0; r < m; ++r) {
          const double a = v[i][r], d = v[j][r];
          v[i][r] = c * a - s * d;
          v[j][r] = s * a + c * d;
        }
      }
    }
    if (worst < 1e-13) break;
  }

  std::vector<double> sigma(m, 0.0);
  double sigma_max = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += cols[i][r] * cols[i][r];
    sigma[i] = std::sqrt(s);
    sigma_max = std::max(sigma_max, sigma[i]);
  }

  std::vector<double> coef(m, 0.0);
  const double cutoff = sigma_max * 1e-10;
  for (std::size_t i = 0; i < m; ++i) {
    if (sigma[i] <= cutoff) continue;
    double proj = 0.0;  // u_i . b, with u_i = col_i / sigma_i
    for (std::size_t r = 0; r < n; ++r) proj += cols[i][r] * b[r];
    proj /= sigma[i] * sigma[i];
    for (std::size_t r = 0; r < m; ++r) coef[r] += v[i][r] * proj;
  }
  return coef;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  std::size_t left_count = 0;
  double score = 0.0;  // summed child SSE
};

}  // namespace

RegressorSpec RegressorSpec::linear() {
  RegressorSpec s;
  s.kind = ModelKind::Linear;
  return s;
}

RegressorSpec RegressorSpec::forest(std::uint64_t seed) {
  RegressorSpec s;
  s.kind = ModelKind::RandomForest;
  s.tree_count = 100;
  s.max_depth = 8;
  s.min_samples_leaf = 2;
  s.sqrt_features = true;
  s.bootstrap = true;
  s.seed = seed;
  return s;
}

RegressorSpec RegressorSpec::boosting(std::uint64_t seed) {
  RegressorSpec s;
  s.kind = ModelKind::GradientBoosting;
  s.tree_count = 100;
  s.max_depth = 3;
  s.min_samples_leaf = 2;
  s.learning_rate = 0.1;
  s.bootstrap = false;
  s.seed = seed;
  return s;
}

void RegressorSpec::validate() const {
  if (tree_count < 1) raise(Errc::EmptyDataset, "tree_count must be >= 1");
  if (max_depth < 1) raise(Errc::EmptyDataset, "max_depth must be >= 1");
  if (min_samples_leaf < 1) raise(Errc::EmptyDataset, "min_samples_leaf must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    raise(Errc::EmptyDataset, "learning_rate must be in (0, 1]");
  }
  if (!sqrt_features &&
      !(feature_subsample_fraction > 0.0 && feature_subsample_fraction <= 1.0)) {
    raise(Errc::EmptyDataset, "feature_subsample_fraction must be in (0, 1]");
  }
}

double Tree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

double FittedRegressor::predict(std::span<const double> x) const {
  if (x.size() != n_features_) {
    raise(Errc::DimensionMismatch, "expected " + std::to_string(n_features_) +
                                       " features, got " + std::to_string(x.size()));
  }
  switch (kind_) {
    case ModelKind::Linear: {
      double acc = intercept_;
      for (std::size_t i = 0; i < coef_.size(); ++i) acc += coef_[i] * x[i];
      return acc;
    }
    case ModelKind::RandomForest: {
      double acc = 0.0;
      for (const Tree& t : trees_) acc += t.predict(x);
      return acc / static_cast<double>(trees_.size());
    }
    case ModelKind::GradientBoosting: {
      double acc = base_;
      for (const Tree& t : trees_) acc += stage_scale_ * t.predict(x);
      return acc;
    }
  }
  return 0.0;
}

FittedRegressor fit_linear(const Matrix& X, const std::vector<double>& y) {
  check_training_input(X, y);
  const std::size_t n = y.size();
  const std::size_t k = X.front().size();

  std::vector<std::vector<double>> cols(k + 1, std::vector<double>(n));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < n; ++r) cols[j][r] = X[r][j];
  }
  std::fill(cols[k].begin(), cols[k].end(), 1.0);  // intercept column

  std::vector<double> full = svd_least_squares(std::move(cols), y);

  FittedRegressor m;
  m.kind_ = ModelKind::Linear;
  m.n_features_ = k;
  m.intercept_ = full.back();
  full.pop_back();
  m.coef_ = std::move(full);
  return m;
}

TreeTrainer::TreeTrainer(const Matrix& X, std::size_t n_features)
    : n_features_(n_features), n_rows_(X.size()) {
  columns_.assign(n_features_, std::vector<double>(n_rows_));
  sorted_rows_.assign(n_features_, {});
  for (std::size_t j = 0; j < n_features_; ++j) {
    for (std::size_t r = 0; r < n_rows_; ++r) columns_[j][r] = X[r][j];
    auto& order = sorted_rows_[j];
    order.resize(n_rows_);
    std::iota(order.begin(), order.end(), 0);
    const auto& col = columns_[j];
    std::stable_sort(order.begin(), order.end(),
                     [&col](int a, int b) { return col[static_cast<std::size_t>(a)] <
                                                   col[static_cast<std::size_t>(b)]; });
  }
}

Tree TreeTrainer::train(std::span<const double> y, std::span<const int> counts,
                        std::size_t n_rows, int max_depth, int min_samples_leaf,
                        double feature_fraction, bool sqrt_features, Rng& rng) const {
  const std::size_t k = n_features_;
  if (k == 0) {
    double sum = 0.0;
    long n = 0;
    for (std::size_t r = 0; r < n_rows; ++r) {
      sum += y[r] * counts[r];
      n += counts[r];
    }
    Tree leaf;
    leaf.nodes.push_back(TreeNode{-1, 0.0, -1, -1, n > 0 ? sum / static_cast<double>(n) : 0.0});
    return leaf;
  }

  // Root sample lists: per feature, member rows in ascending feature order,
  // repeated by bootstrap multiplicity.
  std::vector<std::vector<int>> root(k);
  for (std::size_t j = 0; j < k; ++j) {
    root[j].reserve(n_rows);
    for (int r : sorted_rows_[j]) {
      if (static_cast<std::size_t>(r) >= n_rows) continue;
      for (int c = 0; c < counts[static_cast<std::size_t>(r)]; ++c) root[j].push_back(r);
    }
  }

  std::size_t n_split_features = k;
  if (k > 0) {
    if (sqrt_features) {
      n_split_features = static_cast<std::size_t>(
          std::max(1.0, std::round(std::sqrt(static_cast<double>(k)))));
    } else if (feature_fraction < 1.0) {
      n_split_features = static_cast<std::size_t>(
          std::max(1.0, std::round(feature_fraction * static_cast<double>(k))));
    }
    n_split_features = std::min(n_split_features, k);
  }

  Tree tree;
  std::vector<int> feature_pool(k);
  std::iota(feature_pool.begin(), feature_pool.end(), 0);

  // Iterative build with an explicit stack; parent nodes are patched once the
  // child index is known.
  struct Job {
    std::vector<std::vector<int>> order;
    int depth;
    int parent;
    bool is_left;
  };
  std::vector<Job> stack;
  stack.push_back({std::move(root), 0, -1, false});

  auto attach = [&tree](int parent, bool is_left, int child) {
    if (parent < 0) return;
    if (is_left) tree.nodes[static_cast<std::size_t>(parent)].left = child;
    else tree.nodes[static_cast<std::size_t>(parent)].right = child;
  };

  while (!stack.empty()) {
    Job job = std::move(stack.back());
    stack.pop_back();
    const std::vector<int>& members = job.order.front();
    const std::size_t n = members.size();

    double sum = 0.0, sumsq = 0.0;
    for (int r : members) {
      const double t = y[static_cast<std::size_t>(r)];
      sum += t;
      sumsq += t * t;
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    const double node_sse = std::max(0.0, sumsq - sum * mean);

    SplitChoice best;
    if (job.depth < max_depth && n >= 2 * static_cast<std::size_t>(min_samples_leaf) &&
        node_sse > 0.0 && k > 0) {
      // Candidate features in ascending index order so the strict-improvement
      // comparison realizes the lowest-feature, lowest-threshold tie-break.
      std::vector<int> candidates;
      if (n_split_features == k) {
        candidates = feature_pool;
      } else {
        std::vector<int> pool = feature_pool;
        for (std::size_t i = 0; i < n_split_features; ++i) {
          const std::size_t pick = i + static_cast<std::size_t>(rng.below(pool.size() - i));
          std::swap(pool[i], pool[pick]);
        }
        candidates.assign(pool.begin(), pool.begin() + static_cast<long>(n_split_features));
        std::sort(candidates.begin(), candidates.end());
      }

      for (int f : candidates) {
        const std::vector<int>& ord = job.order[static_cast<std::size_t>(f)];
        const std::vector<double>& col = columns_[static_cast<std::size_t>(f)];
        double lsum = 0.0, lsumsq = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
          const double t = y[static_cast<std::size_t>(ord[i - 1])];
          lsum += t;
          lsumsq += t * t;
          const double prev = col[static_cast<std::size_t>(ord[i - 1])];
          const double next = col[static_cast<std::size_t>(ord[i])];
          if (next <= prev) continue;  // no boundary between equal values
          const std::size_t nl = i, nr = n - i;
          if (nl < static_cast<std::size_t>(min_samples_leaf) ||
              nr < static_cast<std::size_t>(min_samples_leaf)) {
            continue;
          }
          const double rsum = sum - lsum, rsumsq = sumsq - lsumsq;
          const double score = (lsumsq - lsum * lsum / static_cast<double>(nl)) +
                               (rsumsq - rsum * rsum / static_cast<double>(nr));
          if (!best.found || score < best.score) {
            best.found = true;
            best.feature = f;
            best.threshold = prev + 0.5 * (next - prev);
            best.left_count = nl;
            best.score = score;
          }
        }
      }
      if (best.found && !(best.score < node_sse)) best.found = false;
    }

    const int me = static_cast<int>(tree.nodes.size());
    if (!best.found) {
      tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean});
      attach(job.parent, job.is_left, me);
      continue;
    }

    tree.nodes.push_back(TreeNode{best.feature, best.threshold, -1, -1, 0.0});
    attach(job.parent, job.is_left, me);

    Job left{std::vector<std::vector<int>>(k), job.depth + 1, me, true};
    Job right{std::vector<std::vector<int>>(k), job.depth + 1, me, false};
    const std::vector<double>& scol = columns_[static_cast<std::size_t>(best.feature)];
    for (std::size_t j = 0; j < k; ++j) {
      left.order[j].reserve(best.left_count);
      right.order[j].reserve(n - best.left_count);
      for (int r : job.order[j]) {
        if (scol[static_cast<std::size_t>(r)] < best.threshold) left.order[j].push_back(r);
        else right.order[j].push_back(r);
      }
    }
    // Depth-first: push right first so the left subtree is numbered first.
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  return tree;
}

FittedRegressor fit_tree(const Matrix& X, const std::vector<double>& y, int max_depth,
                         int min_samples_leaf, Rng rng) {
  check_training_input(X, y);
  if (max_depth < 1 || min_samples_leaf < 1) raise(Errc::EmptyDataset, "bad tree parameters");
  const std::size_t k = X.front().size();
  TreeTrainer trainer(X, k);
  std::vector<int> counts(y.size(), 1);
  FittedRegressor m;
  m.kind_ = ModelKind::RandomForest;  // single-tree ensemble
  m.n_features_ = k;
  m.trees_.push_back(trainer.train(y, counts, y.size(), max_depth, min_samples_leaf, 1.0,
                                   false, rng));
  return m;
}

FittedRegressor fit_forest(const Matrix& X, const std::vector<double>& y,
                           const RegressorSpec& spec) {
  check_training_input(X, y);
  spec.validate();
  const std::size_t n = y.size();
  const std::size_t k = X.front().size();
  TreeTrainer trainer(X, k);

  FittedRegressor m;
  m.kind_ = ModelKind::RandomForest;
  m.n_features_ = k;
  m.trees_.reserve(static_cast<std::size_t>(spec.tree_count));
  std::vector<int> counts(n);
  for (int t = 0; t < spec.tree_count; ++t) {
    Rng rng = Rng::split(spec.seed, static_cast<std::uint64_t>(t));
    if (spec.bootstrap) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) counts[rng.below(n)] += 1;
    } else {
      std::fill(counts.begin(), counts.end(), 1);
    }
    m.trees_.push_back(trainer.train(y, counts, n, spec.max_depth, spec.min_samples_leaf,
                                     spec.feature_subsample_fraction, spec.sqrt_features, rng));
  }
  return m;
}

FittedRegressor fit_boosting(const Matrix& X, const std::vector<double>& y,
                             const RegressorSpec& spec) {
  check_training_input(X, y);
  spec.validate();
  const std::size_t n = y.size();
  const std::size_t k = X.front().size();
  TreeTrainer trainer(X, k);

  FittedRegressor m;
  m.kind_ = ModelKind::GradientBoosting;
  m.n_features_ = k;
  m.base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  m.stage_scale_ = spec.learning_rate;
  m.trees_.reserve(static_cast<std::size_t>(spec.tree_count));

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - m.base_;
  std::vector<int> counts(n, 1);
  for (int t = 0; t < spec.tree_count; ++t) {
    Rng rng = Rng::split(spec.seed, static_cast<std::uint64_t>(t));
    Tree tree = trainer.train(residual, counts, n, spec.max_depth, spec.min_samples_leaf,
                              spec.feature_subsample_fraction, spec.sqrt_features, rng);
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] -= spec.learning_rate * tree.predict(X[i]);
    }
    m.trees_.push_back(std::move(tree));
  }
  return m;
}

FittedRegressor fit(const Matrix& X, const std::vector<double>& y, const RegressorSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Linear: return fit_linear(X, y);
    case ModelKind::RandomForest: return fit_forest(X, y, spec);
    case ModelKind::GradientBoosting: return fit_boosting(X, y, spec);
  }
  raise(Errc::EmptyDataset, "unknown model kind");
}

}  // namespace votecast
