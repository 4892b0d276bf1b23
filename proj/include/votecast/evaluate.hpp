#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "votecast/arimax.hpp"
#include "votecast/ingest.hpp"
#include "votecast/regressors.hpp"

namespace votecast {

enum class MetricKind { MAE, RMSE };

double mae(std::span<const double> predicted, std::span<const double> actual);
double rmse(std::span<const double> predicted, std::span<const double> actual);

struct StepRecord {
  DayIndex anchor;
  double predicted = 0.0;
  double actual = 0.0;
  int train_size = 0;
};

struct WalkForwardResult {
  std::vector<StepRecord> steps;
  double mae = 0.0;
  double rmse = 0.0;
};

using ModelChoice = std::variant<RegressorSpec, ArimaxOrder>;

struct WalkForwardOptions {
  double initial_train_fraction = 0.8;
  std::optional<int> max_train_rows;  // sliding-window cap, off by default
};

/// Augmented out-of-sample evaluation: train on the leading fraction, predict
/// the next row, append it to the training set, refit, repeat to exhaustion.
WalkForwardResult walk_forward(const ModelDataset& dataset, const ModelChoice& model,
                               WalkForwardOptions options = {});

struct GridCell {
  double mae = 0.0;
  double rmse = 0.0;
  int steps = 0;
};

struct EvalGrid {
  // (feature set, window, model name) -> metrics; absent = skipped cell.
  std::map<std::tuple<FeatureSet, int, std::string>, GridCell> cells;
};

struct NamedModel {
  std::string name;
  ModelChoice choice;
};

struct GridOptions {
  std::vector<int> windows = {1, 2, 3, 4, 5, 6, 7, 14, 21, 28};
  std::vector<FeatureSet> feature_sets = {FeatureSet::TwitterOnly, FeatureSet::FacebookOnly,
                                          FeatureSet::InstagramOnly, FeatureSet::All};
  std::vector<NamedModel> models;  // empty = default_models(seed)
  AnchorMode anchors = AnchorMode::Tumbling;
  WalkForwardOptions walk;
  std::uint64_t seed = 0;
};

/// ARIMAX (paper orders), linear, random forest, gradient boosting.
std::vector<NamedModel> default_models(std::uint64_t seed, ArimaxOrder arimax_order = {});

/// One walk-forward per (feature set, window, model). Cells whose window
/// exceeds the data span are skipped; everything else propagates.
EvalGrid run_grid(const InteractionTable& table, const PollBook& polls, const SubjectId& subject,
                  const GridOptions& options);

// feature_set,window,model,mae,rmse,steps
void write_grid_csv(std::ostream& out, const EvalGrid& grid);

}  // namespace votecast
