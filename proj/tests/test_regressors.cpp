#include <cmath>

#include "doctest.h"
#include "votecast/regressors.hpp"
#include "votecast/rng.hpp"

using namespace votecast;

namespace {

Matrix column(const std::vector<double>& xs) {
  Matrix m;
  for (double x : xs) m.push_back({x});
  return m;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t k) {
  Matrix m(n, std::vector<double>(k));
  for (auto& row : m) {
    for (double& v : row) v = 10.0 * rng.uniform();
  }
  return m;
}

}  // namespace

TEST_CASE("linear fit recovers an exact line") {
  const Matrix x = column({0, 1, 2});
  const std::vector<double> y = {1, 4, 7};
  const FittedRegressor m = fit_linear(x, y);
  CHECK(m.coefficients()[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(m.intercept() == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(m.predict(x[i]) == doctest::Approx(y[i]).epsilon(1e-9));
  }
}

TEST_CASE("linear fit matches hand normal equations") {
  const FittedRegressor m = fit_linear(column({0, 1, 2}), {0, 0, 3});
  CHECK(m.coefficients()[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(m.intercept() == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("duplicated column leaves predictions unchanged (minimum norm)") {
  Rng rng(3);
  const Matrix x1 = random_matrix(rng, 20, 2);
  std::vector<double> y;
  for (const auto& row : x1) y.push_back(2.0 * row[0] - row[1] + 0.5);
  Matrix x2 = x1;
  for (auto& row : x2) row.push_back(row[0]);  // duplicate feature 0
  const FittedRegressor a = fit_linear(x1, y);
  const FittedRegressor b = fit_linear(x2, y);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    CHECK(a.predict(x1[i]) == doctest::Approx(b.predict(x2[i])).epsilon(1e-7));
  }
}

TEST_CASE("linear prediction at x=2 for slope 3 intercept 1") {
  const FittedRegressor m = fit_linear(column({0, 1, 2, 3}), {1, 4, 7, 10});
  CHECK(m.predict(std::vector<double>{2.0}) == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("linear fit error paths") {
  CHECK_THROWS_WITH_AS(fit_linear({}, {}), doctest::Contains("EmptyDataset"), Error);
  CHECK_THROWS_WITH_AS(fit_linear(column({1.0, NAN}), {1, 2}),
                       doctest::Contains("NonFiniteInput"), Error);
  const FittedRegressor m = fit_linear(column({0, 1}), {0, 1});
  CHECK_THROWS_WITH_AS(m.predict(std::vector<double>{1.0, 2.0}),
                       doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("tree: constant targets give a single leaf") {
  const FittedRegressor m = fit_tree(column({1, 2, 3, 4}), {5, 5, 5, 5}, 8, 1);
  CHECK(m.trees().front().nodes.size() == 1);
  CHECK(m.predict(std::vector<double>{99.0}) == 5.0);
}

TEST_CASE("tree: depth-1 split at the midpoint 4.5") {
  const Matrix x = column({1, 2, 3, 4, 5, 6, 7, 8});
  const std::vector<double> y = {0, 0, 0, 0, 10, 10, 10, 10};
  const FittedRegressor m = fit_tree(x, y, 1, 1);
  const Tree& t = m.trees().front();
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(m.predict(std::vector<double>{1.0}) == 0.0);
  CHECK(m.predict(std::vector<double>{8.0}) == 10.0);
  // boundary convention: x >= threshold goes right
  CHECK(m.predict(std::vector<double>{4.5}) == 10.0);
}

TEST_CASE("tree purifies distinct inputs at full depth") {
  Rng rng(5);
  const Matrix x = random_matrix(rng, 40, 3);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] * row[1] - row[2]);
  const FittedRegressor m = fit_tree(x, y, 40, 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(m.predict(x[i]) == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("forest with one unrandomized tree equals fit_tree exactly") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng.below(30);
    const std::size_t k = 1 + rng.below(4);
    const Matrix x = random_matrix(rng, n, k);
    std::vector<double> y;
    for (const auto& row : x) y.push_back(row[0] + 3.0 * rng.uniform());

    RegressorSpec spec = RegressorSpec::forest(trial);
    spec.tree_count = 1;
    spec.bootstrap = false;
    spec.sqrt_features = false;
    spec.feature_subsample_fraction = 1.0;
    spec.max_depth = 6;
    spec.min_samples_leaf = 1;
    const FittedRegressor forest = fit_forest(x, y, spec);
    const FittedRegressor tree = fit_tree(x, y, 6, 1);
    for (const auto& row : x) {
      CHECK(forest.predict(row) == tree.predict(row));  // bit-for-bit
    }
  }
}

TEST_CASE("forest determinism and constant-target behaviour") {
  Rng rng(29);
  const Matrix x = random_matrix(rng, 30, 2);
  const std::vector<double> constant(30, 7.0);
  for (std::uint64_t seed : {1ull, 99ull}) {
    RegressorSpec spec = RegressorSpec::forest(seed);
    spec.tree_count = 10;
    CHECK(fit_forest(x, constant, spec).predict(x[0]) == 7.0);
  }

  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] - row[1]);
  RegressorSpec spec = RegressorSpec::forest(42);
  spec.tree_count = 20;
  const FittedRegressor a = fit_forest(x, y, spec);
  const FittedRegressor b = fit_forest(x, y, spec);
  for (const auto& row : x) CHECK(a.predict(row) == b.predict(row));
}

TEST_CASE("forest prediction lies within the tree prediction range") {
  Rng rng(31);
  const Matrix x = random_matrix(rng, 50, 3);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] * row[2] + rng.gaussian());
  RegressorSpec spec = RegressorSpec::forest(8);
  spec.tree_count = 25;
  const FittedRegressor m = fit_forest(x, y, spec);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> probe = {10.0 * rng.uniform(), 10.0 * rng.uniform(),
                                       10.0 * rng.uniform()};
    double lo = 1e300, hi = -1e300;
    for (const Tree& t : m.trees()) {
      const double p = t.predict(probe);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    const double p = m.predict(probe);
    CHECK(p >= lo - 1e-12);
    CHECK(p <= hi + 1e-12);
  }
}

TEST_CASE("boosting drives training residuals to zero with lr=1") {
  Rng rng(13);
  const Matrix x = random_matrix(rng, 25, 2);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(std::sin(row[0]) + row[1]);
  RegressorSpec spec = RegressorSpec::boosting(2);
  spec.learning_rate = 1.0;
  spec.max_depth = 30;
  spec.min_samples_leaf = 1;
  spec.tree_count = 25;
  const FittedRegressor m = fit_boosting(x, y, spec);
  double mse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = m.predict(x[i]) - y[i];
    mse += e * e;
  }
  CHECK(mse / static_cast<double>(x.size()) < 1e-9);
}

TEST_CASE("single boosting stage moves mean + first-tree fit; lr is linear") {
  const Matrix x = column({0, 1});
  const std::vector<double> y = {0, 10};
  RegressorSpec spec = RegressorSpec::boosting(0);
  spec.tree_count = 1;
  spec.learning_rate = 1.0;
  spec.min_samples_leaf = 1;
  const FittedRegressor full = fit_boosting(x, y, spec);
  // stage 0 mean = 5; residuals (-5, +5) fit exactly by a depth-1 split
  CHECK(full.predict(x[0]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(full.predict(x[1]) == doctest::Approx(10.0).epsilon(1e-12));

  spec.learning_rate = 0.5;
  const FittedRegressor half = fit_boosting(x, y, spec);
  const double mean = 5.0;
  CHECK(half.predict(x[1]) - mean ==
        doctest::Approx(0.5 * (full.predict(x[1]) - mean)).epsilon(1e-12));

  spec.tree_count = 0;
  CHECK_THROWS_AS(fit_boosting(x, y, spec), Error);
}

TEST_CASE("boosting training MSE is non-increasing in stage count") {
  Rng rng(41);
  const Matrix x = random_matrix(rng, 30, 2);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] + 0.3 * rng.gaussian());
  double prev = 1e300;
  for (int stages : {1, 3, 10, 30}) {
    RegressorSpec spec = RegressorSpec::boosting(7);
    spec.tree_count = stages;
    const FittedRegressor m = fit_boosting(x, y, spec);
    double mse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = m.predict(x[i]) - y[i];
      mse += e * e;
    }
    CHECK(mse <= prev + 1e-12);
    prev = mse;
  }
}

TEST_CASE("split models are invariant under monotone feature transforms") {
  Rng rng(53);
  const Matrix x = random_matrix(rng, 40, 2);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] > 5.0 ? row[1] : -row[1]);
  Matrix warped = x;
  for (auto& row : warped) row[0] = std::exp(row[0] * 0.3);  // strictly monotone

  // no bootstrap: every probe is a training member of every tree, so the
  // partition (and the prediction) is identical in both spaces
  RegressorSpec spec = RegressorSpec::forest(3);
  spec.tree_count = 15;
  spec.bootstrap = false;
  const FittedRegressor a = fit_forest(x, y, spec);
  const FittedRegressor b = fit_forest(warped, y, spec);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> probe = x[i];
    std::vector<double> probe_w = probe;
    probe_w[0] = std::exp(probe_w[0] * 0.3);
    CHECK(a.predict(probe) == doctest::Approx(b.predict(probe_w)).epsilon(1e-12));
  }
}
