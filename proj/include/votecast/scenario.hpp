#pragma once

#include <map>
#include <string>
#include <vector>

#include "votecast/ingest.hpp"  // SubjectId

namespace votecast {

/// Shares in percent plus the undecided remainder.
struct ShareVector {
  std::map<SubjectId, double> shares;
  double undecided = 0.0;
};

/// A vote pool to reassign: an eliminated subject, or the undecided share.
struct PoolSource {
  bool is_undecided = false;
  SubjectId subject;  // ignored when is_undecided

  static PoolSource undecided() { return {true, {}}; }
  static PoolSource of(SubjectId s) { return {false, std::move(s)}; }
};

struct TransferAction {
  enum class Kind { Exclude, AllTo, SplitEqual };
  Kind kind = Kind::Exclude;
  std::vector<SubjectId> targets;  // 1 for AllTo, >=1 distinct for SplitEqual

  static TransferAction exclude() { return {Kind::Exclude, {}}; }
  static TransferAction all_to(SubjectId t) { return {Kind::AllTo, {std::move(t)}}; }
  static TransferAction split_equal(std::vector<SubjectId> ts) {
    return {Kind::SplitEqual, std::move(ts)};
  }
};

struct PoolAssignment {
  PoolSource source;
  TransferAction action;
};

struct TransferRule {
  std::string label;
  std::vector<PoolAssignment> pools;
};

/// Scenario outcome. Shares kept at full precision; rounding (half-up to one
/// decimal) happens only at the report boundary.
struct RoundTwoResult {
  std::string label;
  std::map<SubjectId, double> shares;
};

double round_half_up_1dp(double v);

/// Scale every decided share by 100 / decided-total; undecided becomes zero.
ShareVector redistribute_undecided(const ShareVector& v);

/// Apply one transfer rule over a base of finalists plus pool subjects.
RoundTwoResult apply_scenario(const ShareVector& base, const std::vector<SubjectId>& finalists,
                              const TransferRule& rule);

/// The ten canonical round-2 rules (labels A..J) over finalists a, b and one
/// eliminated pool subject, combined with the undecided pool.
std::vector<TransferRule> builtin_scenarios(const SubjectId& finalist_a,
                                            const SubjectId& finalist_b,
                                            const SubjectId& pool_subject);

struct FinalistSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

std::map<SubjectId, FinalistSummary> summarize(const std::vector<RoundTwoResult>& results);

}  // namespace votecast
