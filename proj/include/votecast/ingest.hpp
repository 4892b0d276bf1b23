#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "votecast/series.hpp"

namespace votecast {

enum class Platform { Twitter, Facebook, Instagram };
enum class FeatureKind { Post, Like, Retweet, Reply, Comment, Share };

const char* platform_name(Platform p);
const char* feature_name(FeatureKind f);
std::optional<Platform> parse_platform(std::string_view s);
std::optional<FeatureKind> parse_feature(std::string_view s);

/// Twitter: post/like/retweet/reply; Facebook: post/like/comment/share;
/// Instagram: post/like/share.
bool valid_pair(Platform p, FeatureKind f);

/// Normalized candidate/party key.
struct SubjectId {
  std::string name;
  auto operator<=>(const SubjectId&) const = default;
};

struct SeriesKey {
  SubjectId subject;
  Platform platform;
  FeatureKind feature;
  auto operator<=>(const SeriesKey&) const = default;
};

/// Daily interaction counts per (candidate, platform, feature), densified over
/// a shared coverage range; absent cells are zero.
struct InteractionTable {
  std::map<SeriesKey, DailySeries> series;
  DayIndex start;
  DayIndex end;  // inclusive

  int span_days() const { return end - start + 1; }
  std::vector<SubjectId> subjects() const;
  bool has_subject(const SubjectId& s) const;
  const DailySeries* find(const SubjectId& s, Platform p, FeatureKind f) const;
};

/// Per-subject sparse poll shares plus an optional undecided series.
struct PollBook {
  std::map<SubjectId, SparseObservations> subjects;
  std::optional<SparseObservations> undecided;
};

struct FeatureStats {
  double min = 0, max = 0, mean = 0, stddev = 0;
  int days = 0;
};

/// Table of per-(platform, feature) descriptive statistics.
struct SummaryStats {
  std::map<std::pair<Platform, FeatureKind>, FeatureStats> by_feature;
};

enum class FeatureSet { TwitterOnly, FacebookOnly, InstagramOnly, All };

const char* feature_set_name(FeatureSet fs);
std::optional<FeatureSet> parse_feature_set(std::string_view s);

/// Feature columns of a set in fixed catalog order (Twitter, Facebook,
/// Instagram; post, like, then platform-specific interactions).
std::vector<std::pair<Platform, FeatureKind>> feature_columns(FeatureSet fs);

struct DatasetRow {
  DayIndex anchor;
  std::vector<double> features;
  double target = 0.0;          // percent
  bool extrapolated = false;    // target flat-held past the last poll
};

/// Time-ordered modelling rows for one (subject, feature set, window).
struct ModelDataset {
  SubjectId subject;
  FeatureSet feature_set = FeatureSet::All;
  int window = 1;
  AnchorMode anchors = AnchorMode::Tumbling;
  std::vector<std::string> feature_names;
  std::vector<DatasetRow> rows;
};

// interactions.csv: date,candidate,platform,feature,value
InteractionTable parse_interactions(const std::string& path);
InteractionTable parse_interactions(std::istream& in);

// polls.csv: date,subject,share_pct ("__undecided__" holds the undecided series)
PollBook parse_polls(const std::string& path);
PollBook parse_polls(std::istream& in);

void write_interactions_csv(std::ostream& out, const InteractionTable& t);
void write_polls_csv(std::ostream& out, const PollBook& polls);

/// Per-(platform, feature) min/max/mean/population-std over daily values.
/// Interaction features count only days with at least one post on that
/// platform; post counts cover every coverage day.
SummaryStats describe(const InteractionTable& t, const SubjectId& subject);

/// Windowed feature sums joined with the interpolated poll target at each
/// anchor. Anchors before the first poll are dropped; anchors past the last
/// poll flat-hold the final value and are flagged as extrapolated.
ModelDataset assemble_dataset(const InteractionTable& t, const PollBook& polls,
                              const SubjectId& subject, FeatureSet fs, int w,
                              AnchorMode anchors = AnchorMode::Tumbling);

void write_dataset_csv(std::ostream& out, const ModelDataset& d);
ModelDataset parse_dataset_csv(std::istream& in);

}  // namespace votecast
