#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "votecast/error.hpp"

namespace votecast {

/// Days since 1970-01-01, calendar-date convertible, ISO-8601 in I/O.
struct DayIndex {
  int ordinal = 0;

  static DayIndex from_ymd(int year, int month, int day);
  static DayIndex parse(std::string_view iso);  // "YYYY-MM-DD"
  std::string to_iso() const;

  auto operator<=>(const DayIndex&) const = default;
  DayIndex operator+(int days) const { return DayIndex{ordinal + days}; }
  DayIndex operator-(int days) const { return DayIndex{ordinal - days}; }
  int operator-(DayIndex other) const { return ordinal - other.ordinal; }
};

enum class Unit { Count, Percent };

/// Dense daily values over [start, start + size()).
/// Decomposition components may carry NaN where a value is undefined.
struct DailySeries {
  DayIndex start;
  std::vector<double> values;
  Unit unit = Unit::Count;

  std::size_t size() const { return values.size(); }
  DayIndex day(std::size_t i) const { return start + static_cast<int>(i); }
  DayIndex last_day() const { return start + static_cast<int>(values.size()) - 1; }
  bool contains(DayIndex d) const {
    return d >= start && d.ordinal < start.ordinal + static_cast<int>(values.size());
  }
  double at(DayIndex d) const { return values[static_cast<std::size_t>(d - start)]; }
};

struct PollPoint {
  DayIndex date;
  double value = 0.0;  // percent
};

/// Dated observations, strictly increasing dates.
struct SparseObservations {
  std::vector<PollPoint> points;

  DayIndex first_date() const { return points.front().date; }
  DayIndex last_date() const { return points.back().date; }
};

/// Classical additive decomposition: original = trend + seasonal + residual
/// wherever all three are defined. Trend/residual ends are NaN (undefined).
struct Decomposition {
  DailySeries trend;
  DailySeries seasonal;
  DailySeries residual;
  int period = 0;
};

enum class AnchorMode { Tumbling, Rolling };

struct WindowSum {
  DayIndex anchor;
  double sum = 0.0;
};

/// Linear interpolation between observations onto a dense daily grid spanning
/// [first date, last date]. Exact at the observation dates.
DailySeries interpolate_daily(const SparseObservations& obs);

/// Trailing sums over the w days ending at (and including) each anchor.
/// Tumbling: anchors at start+w-1, start+2w-1, ...; rolling: every day from
/// start+w-1 onward.
std::vector<WindowSum> aggregate_window(const DailySeries& s, int w, AnchorMode anchors);

/// Classical additive decomposition with centered-moving-average trend
/// (2 x period smoothing for even periods) and zero-mean seasonal means.
Decomposition decompose(const DailySeries& s, int period);

bool is_absent(double v);  // NaN marker used by Decomposition

}  // namespace votecast
