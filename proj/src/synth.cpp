#include "votecast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "votecast/rng.hpp"

namespace votecast {

namespace {

std::uint64_t key_stream(const SeriesKey& key) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) { h = (h ^ v) * 1099511628211ULL; };
  for (char c : key.subject.name) mix(static_cast<std::uint64_t>(c));
  mix(static_cast<std::uint64_t>(key.platform) + 101);
  mix(static_cast<std::uint64_t>(key.feature) + 211);
  return h;
}

}  // namespace

std::vector<FeatureStatTarget> benchmark_targets() {
  const SubjectId a{"candidate_a"};
  const SubjectId b{"candidate_b"};
  using P = Platform;
  using F = FeatureKind;
  return {
      {a, P::Twitter, F::Post, 1, 22, 2.18, 1.62},
      {a, P::Twitter, F::Like, 1718, 450026, 45405.50, 53972.29},
      {a, P::Twitter, F::Retweet, 183, 65902, 5160.18, 6336.01},
      {a, P::Twitter, F::Reply, 114, 29884, 3377.89, 3927.55},
      {a, P::Facebook, F::Post, 1, 7, 1.86, 1.06},
      {a, P::Facebook, F::Like, 1200, 167000, 16372.40, 15350.86},
      {a, P::Facebook, F::Comment, 46, 27500, 2606.20, 2880.76},
      {a, P::Facebook, F::Share, 41, 12100, 1876.02, 1657.93},
      {a, P::Instagram, F::Post, 0, 5, 1.29, 0.59},
      {a, P::Instagram, F::Like, 0, 4724120, 485787.72, 426963.44},
      {a, P::Instagram, F::Share, 2310, 179820, 19601.68, 20457.15},
      {b, P::Twitter, F::Post, 1, 257, 4.3, 7.23},
      {b, P::Twitter, F::Like, 9, 3241605, 61702.06, 116693},
      {b, P::Twitter, F::Retweet, 16, 1317198, 17086.71, 40882.07},
      {b, P::Twitter, F::Reply, 1, 110776, 4248.32, 7548.85},
      {b, P::Facebook, F::Post, 1, 18, 3.18, 2.47},
      {b, P::Facebook, F::Like, 3500, 689000, 72004.91, 74402.03},
      {b, P::Facebook, F::Comment, 46, 125000, 6895.86, 8897.32},
      {b, P::Facebook, F::Share, 59, 89900, 4633.98, 6316.15},
      {b, P::Instagram, F::Post, 1, 10, 1.73, 1.44},
      {b, P::Instagram, F::Like, 29169, 1969447, 333650.42, 292143.55},
      {b, P::Instagram, F::Share, 0, 191601, 6883.42, 11296.15},
  };
}

InteractionTable gen_interactions(const std::vector<FeatureStatTarget>& targets, int days,
                                  DayIndex start, std::uint64_t seed) {
  if (days < 30) raise(Errc::InfeasibleTarget, "need at least 30 days");
  InteractionTable table;
  table.start = start;
  table.end = start + (days - 1);

  for (const FeatureStatTarget& target : targets) {
    if (!(target.min <= target.mean && target.mean <= target.max) || target.stddev < 0.0) {
      raise(Errc::InfeasibleTarget, "mean outside [min, max] for " + target.subject.name + "/" +
                                        platform_name(target.platform) + "/" +
                                        feature_name(target.feature));
    }
    const SeriesKey key{target.subject, target.platform, target.feature};
    Rng rng = Rng::split(seed, key_stream(key));

    DailySeries s;
    s.start = start;
    s.unit = Unit::Count;
    s.values.resize(static_cast<std::size_t>(days));

    if (target.stddev == 0.0) {
      std::fill(s.values.begin(), s.values.end(), std::round(target.mean));
    } else {
      // Log-normal shape (heavy right tail, hard minimum) with (mu, sigma)
      // solved from the target moments, then an affine correction so the
      // sampled moments land on the targets before clipping.
      const double ratio = target.stddev / std::max(target.mean, 1e-12);
      const double sigma2 = std::log(1.0 + ratio * ratio);
      const double mu = std::log(std::max(target.mean, 1e-12)) - 0.5 * sigma2;
      const double sigma = std::sqrt(sigma2);
      for (double& v : s.values) v = std::exp(mu + sigma * rng.gaussian());

      double m = std::accumulate(s.values.begin(), s.values.end(), 0.0) / days;
      double var = 0.0;
      for (double v : s.values) var += (v - m) * (v - m);
      const double sd = std::sqrt(var / days);
      const double scale = sd > 0.0 ? target.stddev / sd : 0.0;
      for (double& v : s.values) {
        v = target.mean + (v - m) * scale;
        v = std::clamp(v, std::max(0.0, target.min), target.max);
        v = std::round(v);
      }
    }
    table.series.emplace(key, std::move(s));
  }
  return table;
}

PollBook gen_polls(const LinkModel& link, const InteractionTable& interactions,
                   const SubjectId& subject, int cadence_days, std::uint64_t seed) {
  if (cadence_days < 1) raise(Errc::InfeasibleTarget, "cadence must be >= 1");
  if (!interactions.has_subject(subject)) raise(Errc::UnknownSubject, subject.name);

  const int days = interactions.span_days();

  // Daily total interaction volume for the subject, 7-day trailing sum,
  // z-scored over the whole span.
  std::vector<double> volume(static_cast<std::size_t>(days), 0.0);
  for (const auto& [key, s] : interactions.series) {
    if (key.subject != subject) continue;
    for (std::size_t i = 0; i < s.values.size(); ++i) volume[i] += s.values[i];
  }
  std::vector<double> windowed(static_cast<std::size_t>(days), 0.0);
  double rolling = 0.0;
  for (int t = 0; t < days; ++t) {
    rolling += volume[static_cast<std::size_t>(t)];
    if (t >= 7) rolling -= volume[static_cast<std::size_t>(t - 7)];
    windowed[static_cast<std::size_t>(t)] = rolling;
  }
  const double vm = std::accumulate(windowed.begin(), windowed.end(), 0.0) / days;
  double vvar = 0.0;
  for (double v : windowed) vvar += (v - vm) * (v - vm);
  const double vsd = std::sqrt(vvar / days);

  Rng rng = Rng::split(seed, key_stream(SeriesKey{subject, Platform::Twitter, FeatureKind::Post}) ^
                                 0x706f6c6cULL);
  PollBook book;
  SparseObservations obs;
  SparseObservations undecided;
  for (int t = 0; t < days; t += cadence_days) {
    const double z = vsd > 0.0 ? (windowed[static_cast<std::size_t>(t)] - vm) / vsd : 0.0;
    double share = link.base_share + link.trend_per_day * t +
                   link.seasonal_amplitude *
                       std::sin(2.0 * M_PI * t / static_cast<double>(link.seasonal_period)) +
                   link.interaction_weight * z + link.noise_std * rng.gaussian();
    share = std::clamp(share, 0.0, 100.0);
    obs.points.push_back({interactions.start + t, share});

    double und = link.undecided_base + link.undecided_noise * rng.gaussian();
    und = std::clamp(und, 0.0, 100.0);
    undecided.points.push_back({interactions.start + t, und});
  }
  book.subjects.emplace(subject, std::move(obs));
  book.undecided = std::move(undecided);
  return book;
}

}  // namespace votecast
