// Acceptance gate: one line per criterion, non-zero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "votecast/arimax.hpp"
#include "votecast/evaluate.hpp"
#include "votecast/rng.hpp"
#include "votecast/scenario.hpp"
#include "votecast/series.hpp"
#include "votecast/synth.hpp"

using namespace votecast;

namespace {

int failures = 0;

void report(const std::string& label, bool ok, const std::string& detail = "") {
  std::printf("%s: %s%s%s\n", ok ? "PASS" : "FAIL", label.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const SubjectId kk{"kk"};
const SubjectId rte{"rte"};
const SubjectId ogan{"ogan"};

ShareVector paper_base() {
  ShareVector v;
  v.shares[kk] = 45.0;
  v.shares[rte] = 46.3;
  v.shares[ogan] = 5.2;
  v.undecided = 3.5;
  return v;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rules = builtin_scenarios(kk, rte, ogan);
  const ShareVector base = paper_base();
  // published one-decimal cells; comparison pre-rounding, so the tolerance is
  // the half-cell width (two cells sit exactly on the .x5 boundary)
  const double expected[10][2] = {{45.0, 46.3}, {45.0, 55.0}, {48.5, 51.5}, {50.2, 49.8},
                                  {53.7, 46.3}, {47.6, 52.4}, {51.1, 48.9}, {46.8, 53.2},
                                  {51.9, 48.1}, {49.4, 50.6}};
  const double tol = 0.05 + 1e-9;
  bool ok = rules.size() == 10;
  std::string detail;
  for (std::size_t i = 0; ok && i < rules.size(); ++i) {
    const RoundTwoResult r = apply_scenario(base, {kk, rte}, rules[i]);
    const double da = std::abs(r.shares.at(kk) - expected[i][0]);
    const double db = std::abs(r.shares.at(rte) - expected[i][1]);
    if (da > tol || db > tol) {
      ok = false;
      detail = "scenario " + rules[i].label + ": got " + std::to_string(r.shares.at(kk)) +
               "/" + std::to_string(r.shares.at(rte));
    }
  }
  const double secs = elapsed_s(t0);
  if (ok && secs >= 1.0) {
    ok = false;
    detail = "took " + std::to_string(secs) + " s";
  }
  report("criterion 1 (scenario table reproduction, 20 cells within 0.05, < 1 s)", ok, detail);
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  ShareVector v;
  v.shares[kk] = 44.0;
  v.shares[rte] = 42.0;
  v.shares[SubjectId{"others"}] = 5.5;
  v.undecided = 8.5;
  const ShareVector out = redistribute_undecided(v);
  const bool ok = std::abs(out.shares.at(kk) - 48.1) <= 0.05 &&
                  std::abs(out.shares.at(rte) - 45.9) <= 0.05 && elapsed_s(t0) < 1.0;
  report("criterion 2 (undecided redistribution 44.0/42.0 -> 48.1/45.9, < 1 s)", ok);
}

void criterion_3() {
  const auto rules = builtin_scenarios(kk, rte, ogan);
  const ShareVector base = paper_base();
  std::vector<RoundTwoResult> results;
  for (const auto& rule : rules) results.push_back(apply_scenario(base, {kk, rte}, rule));
  const auto summary = summarize(results);
  auto is = [](double v, double want) { return std::abs(round_half_up_1dp(v) - want) < 1e-9; };
  const bool ok = is(summary.at(kk).min, 45.0) && is(summary.at(kk).max, 53.7) &&
                  is(summary.at(rte).min, 46.3) && is(summary.at(rte).max, 55.0);
  report("criterion 3 (summary ranges 45.0..53.7 and 46.3..55.0)", ok);
}

struct Benchmark {
  InteractionTable table;
  PollBook polls;
  SubjectId subject{"candidate_a"};
  static constexpr std::uint64_t seed = 20230514;

  Benchmark() {
    table = gen_interactions(benchmark_targets(), 1158, DayIndex::from_ymd(2020, 3, 1), seed);
    polls = gen_polls(LinkModel{}, table, subject, 30, seed);
  }
};

void criterion_4(const Benchmark& bench) {
  const auto t0 = std::chrono::steady_clock::now();
  GridOptions options;
  options.seed = Benchmark::seed;
  options.models = default_models(Benchmark::seed, ArimaxOrder{0, 5, 1});
  const EvalGrid grid = run_grid(bench.table, bench.polls, bench.subject, options);
  const double secs = elapsed_s(t0);

  bool full = grid.cells.size() == 160;
  report("criterion 4 pre-check (full 160-cell grid present)", full,
         "got " + std::to_string(grid.cells.size()));

  bool a_ok = full;
  std::string a_detail;
  for (FeatureSet fs : options.feature_sets) {
    if (!full) break;
    const double w1 = grid.cells.at({fs, 1, "arimax"}).mae;
    const double w28 = grid.cells.at({fs, 28, "arimax"}).mae;
    if (!(w1 < 0.1 && w1 <= w28)) {
      a_ok = false;
      a_detail = std::string(feature_set_name(fs)) + ": w1=" + std::to_string(w1) +
                 " w28=" + std::to_string(w28);
    }
  }
  report("criterion 4a (ARIMAX MAE < 0.1 at w=1 and w1 <= w28)", a_ok, a_detail);

  bool b_ok = full;
  std::string b_detail;
  for (FeatureSet fs : options.feature_sets) {
    if (!full) break;
    for (int w : options.windows) {
      const double ar = grid.cells.at({fs, w, "arimax"}).mae;
      for (const char* rival : {"linear", "random_forest", "gradient_boosting"}) {
        const double other = grid.cells.at({fs, w, rival}).mae;
        if (!(ar < other)) {
          b_ok = false;
          b_detail = std::string(feature_set_name(fs)) + " w=" + std::to_string(w) + " " +
                     rival + ": " + std::to_string(ar) + " vs " + std::to_string(other);
        }
      }
    }
  }
  report("criterion 4b (ARIMAX beats every other model in every cell)", b_ok, b_detail);
  report("criterion 4c (full grid under 5 minutes)", secs < 300.0,
         std::to_string(secs) + " s");
}

void criterion_5() {
  bool i_ok = true;
  Rng rng(501);
  for (int trial = 0; trial < 10 && i_ok; ++trial) {
    const std::size_t n = 8 + rng.below(25);
    const std::size_t k = 1 + rng.below(4);
    Matrix x(n, std::vector<double>(k));
    std::vector<double> y;
    for (auto& row : x) {
      for (double& v : row) v = 10.0 * rng.uniform();
    }
    for (const auto& row : x) y.push_back(row[0] * 2.0 + rng.gaussian());
    RegressorSpec spec = RegressorSpec::forest(trial);
    spec.tree_count = 1;
    spec.bootstrap = false;
    spec.sqrt_features = false;
    spec.feature_subsample_fraction = 1.0;
    spec.max_depth = 7;
    spec.min_samples_leaf = 1;
    const FittedRegressor forest = fit_forest(x, y, spec);
    const FittedRegressor tree = fit_tree(x, y, 7, 1);
    for (const auto& row : x) {
      if (forest.predict(row) != tree.predict(row)) i_ok = false;
    }
  }
  report("criterion 5i (single unrandomized forest tree == fit_tree, 10 datasets)", i_ok);

  Matrix xb;
  std::vector<double> yb;
  Rng rng2(502);
  for (int i = 0; i < 30; ++i) {
    xb.push_back({10.0 * rng2.uniform(), 10.0 * rng2.uniform()});
    yb.push_back(std::sin(xb.back()[0]) + xb.back()[1]);
  }
  RegressorSpec boost = RegressorSpec::boosting(3);
  boost.learning_rate = 1.0;
  boost.max_depth = 30;
  boost.min_samples_leaf = 1;
  boost.tree_count = 30;
  const FittedRegressor bm = fit_boosting(xb, yb, boost);
  double mse = 0.0;
  for (std::size_t i = 0; i < xb.size(); ++i) {
    const double e = bm.predict(xb[i]) - yb[i];
    mse += e * e;
  }
  mse /= static_cast<double>(xb.size());
  report("criterion 5ii (boosting with lr=1 purifies: training MSE < 1e-9)", mse < 1e-9,
         "mse=" + std::to_string(mse));

  Rng rng3(503);
  Matrix x3;
  std::vector<double> y3;
  for (int i = 0; i < 120; ++i) {
    x3.push_back({rng3.uniform(), rng3.uniform()});
    y3.push_back(1.5 * x3.back()[0] - 0.7 * x3.back()[1] + 0.1 * rng3.gaussian());
  }
  const ArimaxFit af = fit_arimax(y3, &x3, {0, 0, 0});
  const FittedRegressor lf = fit_linear(x3, y3);
  const bool iii_ok = std::abs(af.beta[0] - lf.coefficients()[0]) < 1e-6 &&
                      std::abs(af.beta[1] - lf.coefficients()[1]) < 1e-6 &&
                      std::abs(af.intercept - lf.intercept()) < 1e-6;
  report("criterion 5iii (ARIMAX(0,0,0) == least squares within 1e-6)", iii_ok);

  Rng rng4(504);
  Matrix x4;
  std::vector<double> y4;
  for (int i = 0; i < 500; ++i) {
    const double xi = 5.0 * rng4.uniform();
    x4.push_back({xi});
    y4.push_back(2.0 * xi + 0.01 * rng4.gaussian());
  }
  const ArimaxFit beta_fit = fit_arimax(y4, &x4, {0, 0, 0});
  bool iv_ok = std::abs(beta_fit.beta[0] - 2.0) <= 0.02;

  Rng rng5(505);
  std::vector<double> y5;
  double prev = rng5.gaussian();
  for (int i = 0; i < 1000; ++i) {
    const double eps = rng5.gaussian();
    y5.push_back(eps + 0.6 * prev);
    prev = eps;
  }
  const ArimaxFit theta_fit = fit_arimax(y5, nullptr, {0, 0, 1});
  iv_ok = iv_ok && std::abs(theta_fit.theta[0] - 0.6) <= 0.1;
  report("criterion 5iv (beta within 1%, theta within 0.1 on simulated data)", iv_ok,
         "beta=" + std::to_string(beta_fit.beta[0]) +
             " theta=" + std::to_string(theta_fit.theta[0]));
}

void criterion_6() {
  bool round_trip = true;
  Rng rng(601);
  for (int d = 0; d <= 5 && round_trip; ++d) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> y;
      const int n = d + 2 + static_cast<int>(rng.below(40));
      for (int i = 0; i < n; ++i) y.push_back(std::round(1000.0 * rng.uniform()) / 8.0);
      const std::vector<double> diffs = difference(y, d);
      std::vector<double> initials;
      std::vector<double> level = y;
      for (int kk2 = 0; kk2 < d; ++kk2) {
        initials.push_back(level[static_cast<std::size_t>(d - 1 - kk2)]);
        level = difference(level, 1);
      }
      const std::vector<double> rest = integrate(diffs, initials, d);
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] != y[static_cast<std::size_t>(d) + i]) round_trip = false;
      }
    }
  }

  bool recon = true;
  DailySeries s{DayIndex::from_ymd(2020, 1, 1), {}, Unit::Count};
  for (int t = 0; t < 120; ++t) {
    s.values.push_back(50.0 + 0.1 * t + 3.0 * std::sin(2.0 * M_PI * t / 7.0) + rng.gaussian());
  }
  const Decomposition dec = decompose(s, 7);
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (is_absent(dec.trend.values[t])) continue;
    const double sum = dec.trend.values[t] + dec.seasonal.values[t] + dec.residual.values[t];
    if (std::abs(sum - s.values[t]) > 1e-9) recon = false;
  }

  bool knots = true;
  SparseObservations obs;
  const DayIndex d0 = DayIndex::from_ymd(2021, 6, 1);
  obs.points = {{d0, 40.0}, {d0 + 11, 50.5}, {d0 + 30, 44.25}};
  const DailySeries daily = interpolate_daily(obs);
  for (const PollPoint& p : obs.points) {
    if (daily.at(p.date) != p.value) knots = false;
  }
  report("criterion 6 (round-trip exact d<=5, reconstruction 1e-9, exact knots)",
         round_trip && recon && knots);
}

void criterion_7() {
  const std::vector<double> pred = {1, 2, 3};
  const std::vector<double> act = {2, 2, 5};
  bool ok = std::abs(mae(pred, act) - 1.0) < 1e-12 &&
            std::abs(rmse(pred, act) - std::sqrt(5.0 / 3.0)) < 1e-12 && mae(act, act) == 0.0 &&
            rmse(act, act) == 0.0;
  Rng rng(701);
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 100.0 * (rng.uniform() - 0.5);
      b[i] = 100.0 * (rng.uniform() - 0.5);
    }
    if (rmse(a, b) < mae(a, b) - 1e-12) ok = false;
  }
  report("criterion 7 (metric identities and rmse >= mae on 1000 pairs)", ok);
}

void criterion_8(const Benchmark& bench) {
  const ModelDataset ds =
      assemble_dataset(bench.table, bench.polls, bench.subject, FeatureSet::TwitterOnly, 7);
  const RegressorSpec spec = RegressorSpec::forest(88);
  const WalkForwardResult a = walk_forward(ds, spec);
  const WalkForwardResult b = walk_forward(ds, spec);

  bool growth = !a.steps.empty();
  for (std::size_t i = 1; i < a.steps.size(); ++i) {
    if (a.steps[i].train_size != a.steps[i - 1].train_size + 1) growth = false;
  }

  bool identical = a.steps.size() == b.steps.size();
  for (std::size_t i = 0; identical && i < a.steps.size(); ++i) {
    identical = a.steps[i].predicted == b.steps[i].predicted &&
                a.steps[i].train_size == b.steps[i].train_size;
  }
  // byte-level check through the serialized grid report
  GridOptions options;
  options.windows = {7};
  options.feature_sets = {FeatureSet::TwitterOnly};
  options.seed = 88;
  std::ostringstream s1, s2;
  write_grid_csv(s1, run_grid(bench.table, bench.polls, bench.subject, options));
  write_grid_csv(s2, run_grid(bench.table, bench.polls, bench.subject, options));
  report("criterion 8 (train_size grows by 1; replay byte-identical)",
         growth && identical && s1.str() == s2.str());
}

void criterion_9(const Benchmark& bench) {
  bool ok = true;
  std::string detail;
  for (const FeatureStatTarget& target : benchmark_targets()) {
    const DailySeries* s = bench.table.find(target.subject, target.platform, target.feature);
    if (s == nullptr) {
      ok = false;
      break;
    }
    const double n = static_cast<double>(s->values.size());
    const double m = std::accumulate(s->values.begin(), s->values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : s->values) var += (v - m) * (v - m);
    const double sd = std::sqrt(var / n);
    if (std::abs(m - target.mean) > 0.10 * target.mean + 1e-9 ||
        std::abs(sd - target.stddev) > 0.20 * target.stddev + 1e-9) {
      ok = false;
      detail = target.subject.name + "/" + platform_name(target.platform) + "/" +
               feature_name(target.feature) + ": mean " + std::to_string(m) + " vs " +
               std::to_string(target.mean) + ", std " + std::to_string(sd) + " vs " +
               std::to_string(target.stddev);
    }
  }
  report("criterion 9 (generator hits mean within 10%, std within 20%)", ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  const Benchmark bench;
  criterion_4(bench);
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(bench);
  criterion_9(bench);
  std::printf("%s (%d failing)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
