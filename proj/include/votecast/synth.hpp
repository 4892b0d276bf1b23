#pragma once

#include <cstdint>
#include <vector>

#include "votecast/ingest.hpp"

namespace votecast {

/// Calibration target for one generated daily feature.
struct FeatureStatTarget {
  SubjectId subject;
  Platform platform = Platform::Twitter;
  FeatureKind feature = FeatureKind::Post;
  double min = 0, max = 0, mean = 0, stddev = 0;
};

/// Latent daily vote share driving the synthetic polls:
///   share(t) = base + trend t + amplitude sin(2 pi t / period)
///            + weight * zscore(7-day interaction volume) + noise.
/// Defaults are the benchmark operating point: a slow upward trend with mild
/// monthly seasonality, a weak interaction link, and low poll noise.
struct LinkModel {
  double base_share = 40.0;
  double trend_per_day = 0.005;
  double seasonal_amplitude = 0.4;
  int seasonal_period = 30;
  double interaction_weight = 0.2;
  double noise_std = 0.05;
  double undecided_base = 5.0;
  double undecided_noise = 0.3;
};

/// Published per-feature statistics for the two benchmark candidates.
std::vector<FeatureStatTarget> benchmark_targets();

/// Clipped log-normal daily counts calibrated to each target's mean/std;
/// deterministic per seed.
InteractionTable gen_interactions(const std::vector<FeatureStatTarget>& targets, int days,
                                  DayIndex start, std::uint64_t seed);

/// Sparse polls sampled every `cadence_days` from the latent share, plus a
/// noisy undecided series.
PollBook gen_polls(const LinkModel& link, const InteractionTable& interactions,
                   const SubjectId& subject, int cadence_days, std::uint64_t seed);

}  // namespace votecast
