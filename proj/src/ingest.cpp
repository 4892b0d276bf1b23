#include "votecast/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace votecast {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* platform_name(Platform p) {
  switch (p) {
    case Platform::Twitter: return "twitter";
    case Platform::Facebook: return "facebook";
    case Platform::Instagram: return "instagram";
  }
  return "?";
}

const char* feature_name(FeatureKind f) {
  switch (f) {
    case FeatureKind::Post: return "post";
    case FeatureKind::Like: return "like";
    case FeatureKind::Retweet: return "retweet";
    case FeatureKind::Reply: return "reply";
    case FeatureKind::Comment: return "comment";
    case FeatureKind::Share: return "share";
  }
  return "?";
}

std::optional<Platform> parse_platform(std::string_view s) {
  if (s == "twitter") return Platform::Twitter;
  if (s == "facebook") return Platform::Facebook;
  if (s == "instagram") return Platform::Instagram;
  return std::nullopt;
}

std::optional<FeatureKind> parse_feature(std::string_view s) {
  if (s == "post") return FeatureKind::Post;
  if (s == "like") return FeatureKind::Like;
  if (s == "retweet") return FeatureKind::Retweet;
  if (s == "reply") return FeatureKind::Reply;
  if (s == "comment") return FeatureKind::Comment;
  if (s == "share") return FeatureKind::Share;
  return std::nullopt;
}

bool valid_pair(Platform p, FeatureKind f) {
  switch (p) {
    case Platform::Twitter:
      return f == FeatureKind::Post || f == FeatureKind::Like || f == FeatureKind::Retweet ||
             f == FeatureKind::Reply;
    case Platform::Facebook:
      return f == FeatureKind::Post || f == FeatureKind::Like || f == FeatureKind::Comment ||
             f == FeatureKind::Share;
    case Platform::Instagram:
      // Instagram's "share (comment)" column is stored under Share.
      return f == FeatureKind::Post || f == FeatureKind::Like || f == FeatureKind::Share;
  }
  return false;
}

std::vector<SubjectId> InteractionTable::subjects() const {
  std::vector<SubjectId> out;
  for (const auto& [key, s] : series) {
    if (out.empty() || out.back() != key.subject) out.push_back(key.subject);
  }
  return out;
}

bool InteractionTable::has_subject(const SubjectId& s) const {
  auto it = series.lower_bound(SeriesKey{s, Platform::Twitter, FeatureKind::Post});
  return it != series.end() && it->first.subject == s;
}

const DailySeries* InteractionTable::find(const SubjectId& s, Platform p, FeatureKind f) const {
  auto it = series.find(SeriesKey{s, p, f});
  return it == series.end() ? nullptr : &it->second;
}

const char* feature_set_name(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::TwitterOnly: return "twitter";
    case FeatureSet::FacebookOnly: return "facebook";
    case FeatureSet::InstagramOnly: return "instagram";
    case FeatureSet::All: return "all";
  }
  return "?";
}

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
  if (s == "twitter") return FeatureSet::TwitterOnly;
  if (s == "facebook") return FeatureSet::FacebookOnly;
  if (s == "instagram") return FeatureSet::InstagramOnly;
  if (s == "all") return FeatureSet::All;
  return std::nullopt;
}

std::vector<std::pair<Platform, FeatureKind>> feature_columns(FeatureSet fs) {
  const std::vector<std::pair<Platform, FeatureKind>> twitter = {
      {Platform::Twitter, FeatureKind::Post},
      {Platform::Twitter, FeatureKind::Like},
      {Platform::Twitter, FeatureKind::Retweet},
      {Platform::Twitter, FeatureKind::Reply}};
  const std::vector<std::pair<Platform, FeatureKind>> facebook = {
      {Platform::Facebook, FeatureKind::Post},
      {Platform::Facebook, FeatureKind::Like},
      {Platform::Facebook, FeatureKind::Comment},
      {Platform::Facebook, FeatureKind::Share}};
  const std::vector<std::pair<Platform, FeatureKind>> instagram = {
      {Platform::Instagram, FeatureKind::Post},
      {Platform::Instagram, FeatureKind::Like},
      {Platform::Instagram, FeatureKind::Share}};
  switch (fs) {
    case FeatureSet::TwitterOnly: return twitter;
    case FeatureSet::FacebookOnly: return facebook;
    case FeatureSet::InstagramOnly: return instagram;
    case FeatureSet::All: {
      auto all = twitter;
      all.insert(all.end(), facebook.begin(), facebook.end());
      all.insert(all.end(), instagram.begin(), instagram.end());
      return all;
    }
  }
  return {};
}

InteractionTable parse_interactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::MalformedRow, "cannot open " + path);
  return parse_interactions(in);
}

InteractionTable parse_interactions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(trim(line)) !=
      std::vector<std::string>{"date", "candidate", "platform", "feature", "value"}) {
    raise(Errc::MalformedRow, "line 1: missing or bad header (expected "
                              "'date,candidate,platform,feature,value')");
  }

  std::map<SeriesKey, std::map<int, long>> cells;
  bool any = false;
  DayIndex lo{0}, hi{0};
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto f = split_csv(t);
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 5) raise(Errc::MalformedRow, where + ": expected 5 fields, got " +
                                                 std::to_string(f.size()));
    DayIndex date;
    try {
      date = DayIndex::parse(f[0]);
    } catch (const Error&) {
      raise(Errc::MalformedRow, where + ": bad date '" + f[0] + "'");
    }
    const std::string subject = trim(f[1]);
    if (subject.empty()) raise(Errc::MalformedRow, where + ": empty candidate");
    const auto platform = parse_platform(f[2]);
    if (!platform) raise(Errc::MalformedRow, where + ": unknown platform '" + f[2] + "'");
    const auto feature = parse_feature(f[3]);
    if (!feature) raise(Errc::MalformedRow, where + ": unknown feature '" + f[3] + "'");
    if (!valid_pair(*platform, *feature)) {
      raise(Errc::InvalidPlatformFeaturePair,
            where + ": " + f[2] + " has no '" + f[3] + "' feature");
    }
    char* endp = nullptr;
    const long value = std::strtol(f[4].c_str(), &endp, 10);
    if (endp == f[4].c_str() || *endp != '\0') {
      raise(Errc::MalformedRow, where + ": bad value '" + f[4] + "'");
    }
    if (value < 0) raise(Errc::NegativeCount, where + ": value " + std::to_string(value));

    const SeriesKey key{SubjectId{subject}, *platform, *feature};
    auto [it, inserted] = cells[key].emplace(date.ordinal, value);
    if (!inserted) {
      raise(Errc::DuplicateCell, where + ": duplicate cell for " + subject + "/" + f[2] + "/" +
                                     f[3] + " on " + f[0]);
    }
    if (!any || date < lo) lo = date;
    if (!any || date > hi) hi = date;
    any = true;
  }
  if (!any) raise(Errc::MalformedRow, "no data rows");

  InteractionTable table;
  table.start = lo;
  table.end = hi;
  const int span = hi - lo + 1;
  for (auto& [key, by_day] : cells) {
    DailySeries s;
    s.start = lo;
    s.unit = Unit::Count;
    s.values.assign(static_cast<std::size_t>(span), 0.0);
    for (const auto& [day, value] : by_day) {
      s.values[static_cast<std::size_t>(day - lo.ordinal)] = static_cast<double>(value);
    }
    table.series.emplace(key, std::move(s));
  }
  return table;
}

PollBook parse_polls(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::MalformedRow, "cannot open " + path);
  return parse_polls(in);
}

PollBook parse_polls(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      split_csv(trim(line)) != std::vector<std::string>{"date", "subject", "share_pct"}) {
    raise(Errc::MalformedRow, "line 1: missing or bad header (expected 'date,subject,share_pct')");
  }

  PollBook book;
  std::map<int, double> date_totals;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto f = split_csv(t);
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 3) raise(Errc::MalformedRow, where + ": expected 3 fields");
    DayIndex date;
    try {
      date = DayIndex::parse(f[0]);
    } catch (const Error&) {
      raise(Errc::MalformedRow, where + ": bad date '" + f[0] + "'");
    }
    const std::string subject = trim(f[1]);
    if (subject.empty()) raise(Errc::MalformedRow, where + ": empty subject");
    char* endp = nullptr;
    const double share = std::strtod(f[2].c_str(), &endp);
    if (endp == f[2].c_str() || *endp != '\0' || !std::isfinite(share)) {
      raise(Errc::MalformedRow, where + ": bad share '" + f[2] + "'");
    }
    if (share < 0.0 || share > 100.0) {
      raise(Errc::ShareOutOfRange, where + ": share " + f[2] + " outside [0, 100]");
    }

    SparseObservations& obs = (subject == "__undecided__")
                                  ? (book.undecided ? *book.undecided
                                                    : book.undecided.emplace())
                                  : book.subjects[SubjectId{subject}];
    if (!obs.points.empty() && !(obs.points.back().date < date)) {
      raise(Errc::NonMonotoneDates, where + ": dates for " + subject + " not increasing");
    }
    obs.points.push_back({date, share});
    date_totals[date.ordinal] += share;
  }
  // Tolerance of 0.5 for published rounding of per-date totals.
  for (const auto& [day, total] : date_totals) {
    if (total > 100.5) {
      raise(Errc::SumExceeds100, "shares on " + DayIndex{day}.to_iso() + " sum to " +
                                     fmt_double(total));
    }
  }
  return book;
}

void write_interactions_csv(std::ostream& out, const InteractionTable& t) {
  out << "date,candidate,platform,feature,value\n";
  for (const auto& [key, s] : t.series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << s.day(i).to_iso() << ',' << key.subject.name << ',' << platform_name(key.platform)
          << ',' << feature_name(key.feature) << ',' << static_cast<long>(s.values[i]) << '\n';
    }
  }
}

void write_polls_csv(std::ostream& out, const PollBook& polls) {
  out << "date,subject,share_pct\n";
  for (const auto& [subject, obs] : polls.subjects) {
    for (const PollPoint& p : obs.points) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", p.value);
      out << p.date.to_iso() << ',' << subject.name << ',' << buf << '\n';
    }
  }
  if (polls.undecided) {
    for (const PollPoint& p : polls.undecided->points) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", p.value);
      out << p.date.to_iso() << ",__undecided__," << buf << '\n';
    }
  }
}

SummaryStats describe(const InteractionTable& t, const SubjectId& subject) {
  if (!t.has_subject(subject)) raise(Errc::UnknownSubject, subject.name);
  SummaryStats stats;
  for (const auto& [key, s] : t.series) {
    if (key.subject != subject) continue;
    const DailySeries* posts = t.find(subject, key.platform, FeatureKind::Post);
    FeatureStats fs;
    double sum = 0.0, sumsq = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      // Interaction stats cover only days with at least one post on the
      // platform; post counts cover every coverage day.
      if (key.feature != FeatureKind::Post && posts != nullptr && posts->values[i] <= 0.0) {
        continue;
      }
      const double v = s.values[i];
      if (first || v < fs.min) fs.min = v;
      if (first || v > fs.max) fs.max = v;
      first = false;
      sum += v;
      sumsq += v * v;
      fs.days += 1;
    }
    if (fs.days > 0) {
      fs.mean = sum / fs.days;
      const double var = std::max(0.0, sumsq / fs.days - fs.mean * fs.mean);
      fs.stddev = std::sqrt(var);
    }
    stats.by_feature[{key.platform, key.feature}] = fs;
  }
  return stats;
}

ModelDataset assemble_dataset(const InteractionTable& t, const PollBook& polls,
                              const SubjectId& subject, FeatureSet fs, int w,
                              AnchorMode anchors) {
  if (!t.has_subject(subject)) raise(Errc::UnknownSubject, subject.name + " (interactions)");
  auto poll_it = polls.subjects.find(subject);
  if (poll_it == polls.subjects.end()) raise(Errc::UnknownSubject, subject.name + " (polls)");
  const SparseObservations& obs = poll_it->second;
  if (obs.points.size() < 2) raise(Errc::InsufficientOverlap, "fewer than 2 polls");

  const int overlap = std::min(t.end, obs.last_date()) - std::max(t.start, obs.first_date()) + 1;
  if (overlap < 2 * w) {
    raise(Errc::InsufficientOverlap, "poll/interaction overlap of " + std::to_string(overlap) +
                                         " days < 2w = " + std::to_string(2 * w));
  }

  const auto columns = feature_columns(fs);
  ModelDataset out;
  out.subject = subject;
  out.feature_set = fs;
  out.window = w;
  out.anchors = anchors;

  std::vector<std::vector<WindowSum>> sums;
  sums.reserve(columns.size());
  const int span = t.span_days();
  for (const auto& [platform, feature] : columns) {
    out.feature_names.push_back(std::string(platform_name(platform)) + "." +
                                feature_name(feature));
    const DailySeries* s = t.find(subject, platform, feature);
    if (s != nullptr) {
      sums.push_back(aggregate_window(*s, w, anchors));
    } else {
      // Feature never observed for this subject: densified zeros.
      DailySeries zero{t.start, std::vector<double>(static_cast<std::size_t>(span), 0.0),
                       Unit::Count};
      sums.push_back(aggregate_window(zero, w, anchors));
    }
  }

  const DailySeries target = interpolate_daily(obs);
  const std::size_t n_anchors = sums.front().size();
  for (std::size_t r = 0; r < n_anchors; ++r) {
    const DayIndex anchor = sums.front()[r].anchor;
    if (anchor < target.start) continue;  // no poll signal yet
    DatasetRow row;
    row.anchor = anchor;
    if (target.contains(anchor)) {
      row.target = target.at(anchor);
    } else {
      row.target = obs.points.back().value;  // flat-hold past the last poll
      row.extrapolated = true;
    }
    row.features.reserve(columns.size());
    for (const auto& col : sums) row.features.push_back(col[r].sum);
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const ModelDataset& d) {
  out << "# subject=" << d.subject.name << " feature_set=" << feature_set_name(d.feature_set)
      << " window=" << d.window
      << " anchors=" << (d.anchors == AnchorMode::Tumbling ? "tumbling" : "rolling") << '\n';
  out << "anchor";
  for (const auto& name : d.feature_names) out << ',' << name;
  out << ",target,extrapolated\n";
  for (const DatasetRow& row : d.rows) {
    out << row.anchor.to_iso();
    for (double v : row.features) out << ',' << fmt_double(v);
    out << ',' << fmt_double(row.target) << ',' << (row.extrapolated ? 1 : 0) << '\n';
  }
}

ModelDataset parse_dataset_csv(std::istream& in) {
  ModelDataset d;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# subject=", 0) != 0) {
    raise(Errc::MalformedRow, "line 1: missing dataset metadata");
  }
  {
    std::istringstream meta(line.substr(2));
    std::string kv;
    while (meta >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "subject") d.subject.name = value;
      else if (key == "feature_set") d.feature_set = parse_feature_set(value).value_or(FeatureSet::All);
      else if (key == "window") d.window = std::atoi(value.c_str());
      else if (key == "anchors") d.anchors = value == "rolling" ? AnchorMode::Rolling
                                                               : AnchorMode::Tumbling;
    }
  }
  if (!std::getline(in, line)) raise(Errc::MalformedRow, "line 2: missing header");
  auto header = split_csv(trim(line));
  if (header.size() < 3 || header.front() != "anchor" || header[header.size() - 2] != "target" ||
      header.back() != "extrapolated") {
    raise(Errc::MalformedRow, "line 2: bad dataset header");
  }
  d.feature_names.assign(header.begin() + 1, header.end() - 2);
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto f = split_csv(t);
    if (f.size() != header.size()) {
      raise(Errc::MalformedRow, "line " + std::to_string(lineno) + ": field count mismatch");
    }
    DatasetRow row;
    row.anchor = DayIndex::parse(f[0]);
    for (std::size_t i = 1; i + 2 < f.size(); ++i) row.features.push_back(std::strtod(f[i].c_str(), nullptr));
    row.target = std::strtod(f[f.size() - 2].c_str(), nullptr);
    row.extrapolated = f.back() == "1";
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace votecast
