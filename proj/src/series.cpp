#include "votecast/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace votecast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Proleptic Gregorian day arithmetic (days since 1970-01-01).
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yy = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

DayIndex DayIndex::from_ymd(int year, int month, int day) {
  return DayIndex{static_cast<int>(days_from_civil(year, month, day))};
}

DayIndex DayIndex::parse(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(std::string(iso).c_str(), "%d-%d-%d", &y, &m, &d) != 3 ||
      m < 1 || m > 12 || d < 1 || d > 31) {
    raise(Errc::MalformedRow, "bad ISO date '" + std::string(iso) + "'");
  }
  return from_ymd(y, m, d);
}

std::string DayIndex::to_iso() const {
  int y, m, d;
  civil_from_days(ordinal, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

bool is_absent(double v) { return std::isnan(v); }

DailySeries interpolate_daily(const SparseObservations& obs) {
  if (obs.points.size() < 2) {
    raise(Errc::FewerThanTwoPoints, "interpolation needs at least 2 observations");
  }
  for (std::size_t i = 1; i < obs.points.size(); ++i) {
    if (!(obs.points[i - 1].date < obs.points[i].date)) {
      raise(Errc::NonMonotoneDates,
            "observation dates must be strictly increasing at index " + std::to_string(i));
    }
  }
  DailySeries out;
  out.start = obs.first_date();
  out.unit = Unit::Percent;
  const int span = obs.last_date() - obs.first_date();
  out.values.reserve(static_cast<std::size_t>(span) + 1);
  std::size_t seg = 0;
  for (int t = 0; t <= span; ++t) {
    const DayIndex day = out.start + t;
    while (seg + 2 < obs.points.size() && obs.points[seg + 1].date <= day) ++seg;
    const PollPoint& a = obs.points[seg];
    const PollPoint& b = obs.points[seg + 1];
    if (day == a.date) {
      out.values.push_back(a.value);
    } else if (day == b.date) {
      out.values.push_back(b.value);
    } else {
      const double frac = static_cast<double>(day - a.date) / static_cast<double>(b.date - a.date);
      out.values.push_back(a.value + frac * (b.value - a.value));
    }
  }
  return out;
}

std::vector<WindowSum> aggregate_window(const DailySeries& s, int w, AnchorMode anchors) {
  if (w < 1 || static_cast<std::size_t>(w) > s.size()) {
    raise(Errc::WindowLargerThanSeries,
          "window " + std::to_string(w) + " vs series length " + std::to_string(s.size()));
  }
  std::vector<WindowSum> out;
  const int n = static_cast<int>(s.size());
  if (anchors == AnchorMode::Rolling) {
    double sum = std::accumulate(s.values.begin(), s.values.begin() + w, 0.0);
    out.push_back({s.start + (w - 1), sum});
    for (int i = w; i < n; ++i) {
      sum += s.values[static_cast<std::size_t>(i)] - s.values[static_cast<std::size_t>(i - w)];
      out.push_back({s.start + i, sum});
    }
  } else {
    for (int end = w - 1; end < n; end += w) {
      double sum = 0.0;
      for (int i = end - w + 1; i <= end; ++i) sum += s.values[static_cast<std::size_t>(i)];
      out.push_back({s.start + end, sum});
    }
  }
  return out;
}

Decomposition decompose(const DailySeries& s, int period) {
  const int n = static_cast<int>(s.size());
  if (period < 1 || n < 2 * period) {
    raise(Errc::SeriesTooShort,
          "need at least 2*period=" + std::to_string(2 * period) + " values, got " +
              std::to_string(n));
  }

  // Trend: centered moving average; even periods use the standard 2 x period
  // smoothing (half weights at both ends of a period+1 wide window).
  std::vector<double> trend(static_cast<std::size_t>(n), kNaN);
  if (period % 2 == 1) {
    const int half = period / 2;
    for (int t = half; t < n - half; ++t) {
      double sum = 0.0;
      for (int j = -half; j <= half; ++j) sum += s.values[static_cast<std::size_t>(t + j)];
      trend[static_cast<std::size_t>(t)] = sum / period;
    }
  } else {
    const int half = period / 2;
    for (int t = half; t < n - half; ++t) {
      double sum = 0.5 * (s.values[static_cast<std::size_t>(t - half)] +
                          s.values[static_cast<std::size_t>(t + half)]);
      for (int j = -half + 1; j <= half - 1; ++j) sum += s.values[static_cast<std::size_t>(t + j)];
      trend[static_cast<std::size_t>(t)] = sum / period;
    }
  }

  // Seasonal: per-position means of the detrended values, re-centered to zero.
  std::vector<double> pos_sum(static_cast<std::size_t>(period), 0.0);
  std::vector<int> pos_count(static_cast<std::size_t>(period), 0);
  for (int t = 0; t < n; ++t) {
    if (std::isnan(trend[static_cast<std::size_t>(t)])) continue;
    pos_sum[static_cast<std::size_t>(t % period)] +=
        s.values[static_cast<std::size_t>(t)] - trend[static_cast<std::size_t>(t)];
    pos_count[static_cast<std::size_t>(t % period)] += 1;
  }
  std::vector<double> seasonal_cycle(static_cast<std::size_t>(period), 0.0);
  for (int p = 0; p < period; ++p) {
    if (pos_count[static_cast<std::size_t>(p)] > 0) {
      seasonal_cycle[static_cast<std::size_t>(p)] =
          pos_sum[static_cast<std::size_t>(p)] / pos_count[static_cast<std::size_t>(p)];
    }
  }
  const double cycle_mean =
      std::accumulate(seasonal_cycle.begin(), seasonal_cycle.end(), 0.0) / period;
  for (double& v : seasonal_cycle) v -= cycle_mean;

  Decomposition out;
  out.period = period;
  out.trend = DailySeries{s.start, std::move(trend), s.unit};
  out.seasonal.start = s.start;
  out.seasonal.unit = s.unit;
  out.seasonal.values.resize(static_cast<std::size_t>(n));
  out.residual.start = s.start;
  out.residual.unit = s.unit;
  out.residual.values.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const double sv = seasonal_cycle[static_cast<std::size_t>(t % period)];
    out.seasonal.values[static_cast<std::size_t>(t)] = sv;
    const double tv = out.trend.values[static_cast<std::size_t>(t)];
    out.residual.values[static_cast<std::size_t>(t)] =
        std::isnan(tv) ? kNaN : s.values[static_cast<std::size_t>(t)] - tv - sv;
  }
  return out;
}

}  // namespace votecast
