#include "votecast/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace votecast {

double round_half_up_1dp(double v) { return std::floor(v * 10.0 + 0.5) / 10.0; }

ShareVector redistribute_undecided(const ShareVector& v) {
  double decided = 0.0;
  for (const auto& [subject, share] : v.shares) decided += share;
  if (decided <= 0.0) raise(Errc::AllUndecided, "no decided share to scale");
  ShareVector out;
  const double scale = 100.0 / decided;
  for (const auto& [subject, share] : v.shares) out.shares[subject] = share * scale;
  out.undecided = 0.0;
  return out;
}

RoundTwoResult apply_scenario(const ShareVector& base, const std::vector<SubjectId>& finalists,
                              const TransferRule& rule) {
  RoundTwoResult result;
  result.label = rule.label;
  for (const SubjectId& f : finalists) {
    auto it = base.shares.find(f);
    if (it == base.shares.end()) raise(Errc::UnknownSource, "finalist " + f.name + " not in base");
    result.shares[f] = it->second;
  }
  for (const PoolAssignment& pool : rule.pools) {
    double amount = 0.0;
    if (pool.source.is_undecided) {
      amount = base.undecided;
    } else {
      auto it = base.shares.find(pool.source.subject);
      if (it == base.shares.end()) {
        raise(Errc::UnknownSource, "pool subject " + pool.source.subject.name + " not in base");
      }
      amount = it->second;
    }
    switch (pool.action.kind) {
      case TransferAction::Kind::Exclude:
        break;  // mass leaves the race un-renormalized
      case TransferAction::Kind::AllTo: {
        auto it = result.shares.find(pool.action.targets.front());
        if (it == result.shares.end()) {
          raise(Errc::UnknownTarget, pool.action.targets.front().name);
        }
        it->second += amount;
        break;
      }
      case TransferAction::Kind::SplitEqual: {
        const double each = amount / static_cast<double>(pool.action.targets.size());
        for (const SubjectId& t : pool.action.targets) {
          auto it = result.shares.find(t);
          if (it == result.shares.end()) raise(Errc::UnknownTarget, t.name);
          it->second += each;
        }
        break;
      }
    }
  }
  return result;
}

std::vector<TransferRule> builtin_scenarios(const SubjectId& finalist_a,
                                            const SubjectId& finalist_b,
                                            const SubjectId& pool_subject) {
  const std::set<SubjectId> distinct = {finalist_a, finalist_b, pool_subject};
  if (distinct.size() != 3) {
    raise(Errc::DuplicateSubjects, "finalists and pool subject must be distinct");
  }
  const PoolSource pool = PoolSource::of(pool_subject);
  const PoolSource und = PoolSource::undecided();
  const std::vector<SubjectId> both = {finalist_a, finalist_b};
  auto to_a = TransferAction::all_to(finalist_a);
  auto to_b = TransferAction::all_to(finalist_b);
  auto split = TransferAction::split_equal(both);
  auto drop = TransferAction::exclude();

  return {
      {"A", {{pool, drop}, {und, drop}}},
      {"B", {{pool, to_b}, {und, to_b}}},
      {"C", {{und, to_a}, {pool, to_b}}},
      {"D", {{pool, to_a}, {und, to_b}}},
      {"E", {{pool, to_a}, {und, to_a}}},
      {"F", {{pool, split}, {und, to_b}}},
      {"G", {{pool, split}, {und, to_a}}},
      {"H", {{und, split}, {pool, to_b}}},
      {"I", {{und, split}, {pool, to_a}}},
      {"J", {{pool, split}, {und, split}}},
  };
}

std::map<SubjectId, FinalistSummary> summarize(const std::vector<RoundTwoResult>& results) {
  if (results.empty()) raise(Errc::EmptyInput, "no scenario results");
  std::map<SubjectId, FinalistSummary> out;
  std::map<SubjectId, int> counts;
  for (const RoundTwoResult& r : results) {
    for (const auto& [subject, share] : r.shares) {
      auto [it, inserted] = out.try_emplace(subject, FinalistSummary{share, share, 0.0});
      if (!inserted) {
        it->second.min = std::min(it->second.min, share);
        it->second.max = std::max(it->second.max, share);
      }
      it->second.mean += share;
      counts[subject] += 1;
    }
  }
  for (auto& [subject, s] : out) s.mean /= counts[subject];
  return out;
}

}  // namespace votecast
