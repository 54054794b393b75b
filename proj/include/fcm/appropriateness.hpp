#pragma once

// Ranking of candidate policy nodes by a weighted mix of Importance,
// Feasibility and Influence, each expressed as a percentage across the
// candidate cohort.

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/hierarchy.hpp"
#include "fcm/simulation.hpp"

namespace fcm {

struct CriterionWeights {
  double importance = 0.25;
  double feasibility = 0.25;
  double influence = 0.5;

  void validate() const;
  friend bool operator==(const CriterionWeights&, const CriterionWeights&) = default;
};

/// Parses "0.25,0.25,0.5".
CriterionWeights parse_criterion_weights(std::string_view text);

struct TargetGroup {
  std::string name;
  std::vector<std::string> node_ids;
  /// +1 when an increase is desired, -1 when a decrease is.
  int desired_sign = 1;
};

struct TargetSets {
  std::vector<std::string> economic_nodes;
  /// +1: a rise of the economic nodes counts as feasible.
  int economic_sign = 1;
  std::vector<TargetGroup> targets;

  /// Nonempty sets, disjoint from the candidates, signs of +-1.
  void validate(const std::vector<std::string>& candidates) const;
  nlohmann::json to_json() const;
  /// Inverse of to_json; "economic_sign" and "desired_sign" default to +1.
  static TargetSets from_json(const nlohmann::json& doc);
};

/// Economic nodes under concept D, targets under A (+), B (+) and C (-), all
/// at `level`; candidates are removed from every set.
TargetSets default_targets(const CondensationHierarchy& h, Level level,
                           const std::vector<std::string>& candidates = {});

/// mean(cw%, mentions%) per candidate.
std::vector<double> importance(std::span<const double> cw, std::span<const double> mentions);

/// Mean delta over the economic nodes, per candidate.
std::vector<double> economic_effects(const std::vector<ScenarioComparison>& comparisons, const TargetSets& targets);
/// economic_sign * effect / sum |effect| * 100.
std::vector<double> feasibility(std::span<const double> economic_effects, int economic_sign = 1);

/// Sign-adjusted mean delta per target group (rows: candidates, cols: groups).
std::vector<std::vector<double>> target_effects(const std::vector<ScenarioComparison>& comparisons,
                                                const TargetSets& targets);
/// Each group normalized across candidates to a signed percentage of the
/// absolute total, then averaged over groups. Returns per-candidate influence;
/// `per_group` (optional) receives the group percentages.
std::vector<double> influence(const std::vector<std::vector<double>>& effects,
                              std::vector<std::vector<double>>* per_group = nullptr);

struct CandidateCriteria {
  std::string id;
  double importance = 0.0;
  double feasibility = 0.0;
  double influence = 0.0;
};

struct CandidateScore {
  std::string id;
  double importance = 0.0;
  double feasibility = 0.0;
  double influence = 0.0;
  /// Weighted sum before normalization.
  double raw = 0.0;
  /// raw as a percentage of the sum of positive raw scores.
  double appropriateness = 0.0;
  int rank = 0;
  /// Breakdown, when computed from simulations.
  double cw_percent = 0.0;
  double mentions_percent = 0.0;
  std::vector<double> target_percent;
};

struct AppropriatenessReport {
  /// Sorted by rank.
  std::vector<CandidateScore> candidates;
  CriterionWeights weights;
  std::vector<std::string> target_groups;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Weighted aggregation and ranking. Ties in raw score fall back to
/// influence, then importance, then id.
AppropriatenessReport appropriateness(const std::vector<CandidateCriteria>& inputs,
                                      const CriterionWeights& weights = {});

/// Full computation from cohort data: `cw` and `mentions` per candidate and
/// one clamp-high comparison per candidate against the shared baseline.
AppropriatenessReport rank_candidates(const std::vector<std::string>& candidates, std::span<const double> cw,
                                      std::span<const double> mentions,
                                      const std::vector<ScenarioComparison>& comparisons,
                                      const TargetSets& targets, const CriterionWeights& weights = {});

}  // namespace fcm
