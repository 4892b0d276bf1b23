#include "votecast/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace votecast {

namespace {

void check_pair(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    raise(Errc::LengthMismatch, std::to_string(predicted.size()) + " vs " +
                                    std::to_string(actual.size()));
  }
  if (predicted.empty()) raise(Errc::EmptyInput, "no values to score");
}

}  // namespace

double mae(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual);
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) acc += std::abs(predicted[i] - actual[i]);
  return acc / static_cast<double>(predicted.size());
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual);
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

WalkForwardResult walk_forward(const ModelDataset& dataset, const ModelChoice& model,
                               WalkForwardOptions options) {
  const int n = static_cast<int>(dataset.rows.size());
  if (!(options.initial_train_fraction > 0.0 && options.initial_train_fraction < 1.0)) {
    raise(Errc::DatasetTooSmall, "initial_train_fraction must be in (0, 1)");
  }
  const int t0 = static_cast<int>(std::ceil(options.initial_train_fraction * n));
  if (t0 < 1 || t0 >= n) {
    raise(Errc::DatasetTooSmall, "no test rows after a " +
                                     std::to_string(options.initial_train_fraction) + " split of " +
                                     std::to_string(n) + " rows");
  }
  const int k = static_cast<int>(dataset.feature_names.size());
  if (const auto* order = std::get_if<ArimaxOrder>(&model)) {
    const int usable = t0 - order->d - order->p;
    if (order->p + order->q + k + 1 >= usable) {
      raise(Errc::DatasetTooSmall, "initial training window too small for ARIMAX order");
    }
  }

  WalkForwardResult result;
  std::vector<double> predicted, actual;
  for (int i = t0; i < n; ++i) {
    int lo = 0;
    if (options.max_train_rows && i - *options.max_train_rows > 0) {
      lo = i - *options.max_train_rows;
    }
    Matrix x_train;
    std::vector<double> y_train;
    x_train.reserve(static_cast<std::size_t>(i - lo));
    y_train.reserve(static_cast<std::size_t>(i - lo));
    for (int r = lo; r < i; ++r) {
      x_train.push_back(dataset.rows[static_cast<std::size_t>(r)].features);
      y_train.push_back(dataset.rows[static_cast<std::size_t>(r)].target);
    }
    const DatasetRow& test = dataset.rows[static_cast<std::size_t>(i)];

    double pred = 0.0;
    if (const auto* spec = std::get_if<RegressorSpec>(&model)) {
      const FittedRegressor fitted = fit(x_train, y_train, *spec);
      pred = fitted.predict(test.features);
    } else {
      const ArimaxOrder order = std::get<ArimaxOrder>(model);
      const ArimaxFit fitted = fit_arimax(y_train, k > 0 ? &x_train : nullptr, order);
      Matrix future = {test.features};
      pred = forecast(fitted, 1, k > 0 ? &future : nullptr).front();
    }
    result.steps.push_back({test.anchor, pred, test.target, i - lo});
    predicted.push_back(pred);
    actual.push_back(test.target);
  }
  result.mae = mae(predicted, actual);
  result.rmse = rmse(predicted, actual);
  return result;
}

std::vector<NamedModel> default_models(std::uint64_t seed, ArimaxOrder arimax_order) {
  return {
      {"arimax", arimax_order},
      {"linear", RegressorSpec::linear()},
      {"random_forest", RegressorSpec::forest(seed)},
      {"gradient_boosting", RegressorSpec::boosting(seed)},
  };
}

EvalGrid run_grid(const InteractionTable& table, const PollBook& polls, const SubjectId& subject,
                  const GridOptions& options) {
  const std::vector<NamedModel> models =
      options.models.empty() ? default_models(options.seed) : options.models;

  struct Job {
    FeatureSet fs;
    int window;
    std::size_t model_index;
  };
  std::vector<Job> jobs;
  for (FeatureSet fs : options.feature_sets) {
    for (int w : options.windows) {
      for (std::size_t m = 0; m < models.size(); ++m) jobs.push_back({fs, w, m});
    }
  }

  std::vector<std::optional<GridCell>> results(jobs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = cursor.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      try {
        ModelDataset dataset =
            assemble_dataset(table, polls, subject, job.fs, job.window, options.anchors);
        ModelChoice choice = models[job.model_index].choice;
        if (auto* spec = std::get_if<RegressorSpec>(&choice)) {
          // Per-cell seed derived from the master seed; independent of
          // scheduling so parallel and serial runs agree.
          spec->seed = Rng::split(options.seed,
                                  (static_cast<std::uint64_t>(job.fs) * 131 +
                                   static_cast<std::uint64_t>(job.window)) *
                                          64 +
                                      job.model_index)
                           .next();
        }
        WalkForwardResult r = walk_forward(dataset, choice, options.walk);
        results[j] = GridCell{r.mae, r.rmse, static_cast<int>(r.steps.size())};
      } catch (const Error&) {
        results[j] = std::nullopt;  // skipped cell (e.g. window exceeds span)
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  if (n_threads <= 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EvalGrid grid;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!results[j]) continue;
    grid.cells[{jobs[j].fs, jobs[j].window, models[jobs[j].model_index].name}] = *results[j];
  }
  return grid;
}

void write_grid_csv(std::ostream& out, const EvalGrid& grid) {
  out << "feature_set,window,model,mae,rmse,steps\n";
  for (const auto& [key, cell] : grid.cells) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", cell.mae, cell.rmse);
    out << feature_set_name(std::get<0>(key)) << ',' << std::get<1>(key) << ','
        << std::get<2>(key) << ',' << buf << ',' << cell.steps << '\n';
  }
}

}  // namespace votecast
