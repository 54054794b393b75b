#pragma once

// Credibility-weighted aggregation of same-level maps into a group or social
// map: every map is augmented onto the union node set and the matrices are
// summed with per-map weights.

#include <span>
#include <string>
#include <vector>

#include "fcm/centrality.hpp"
#include "fcm/hierarchy.hpp"
#include "fcm/model.hpp"

namespace fcm {

/// Union of the node ids of `maps`: hierarchy order when every id is in `h`,
/// otherwise sorted by id (digits compared numerically).
std::vector<std::string> union_node_ids(std::span<const FcmModel* const> maps,
                                        const CondensationHierarchy* h = nullptr);

/// Re-index `m` onto `union_ids`; nodes missing from `m` get zero rows and
/// columns. Every node of `m` must appear in `union_ids`.
FcmModel augment(const FcmModel& m, const std::vector<std::string>& union_ids);

struct AggregateOptions {
  std::string stakeholder_id = "social";
  std::string group_id = "aggregate";
  /// "group" or "social".
  std::string kind = "social";
  const CondensationHierarchy* hierarchy = nullptr;
};

struct AggregationResult {
  FcmModel model;
  /// Entries where contributions cancelled exactly, and similar notes.
  std::vector<std::string> warnings;
};

/// Soc = sum_k cw_k * augment(FCM_k), with cw renormalized over `maps`.
/// The summation runs in stakeholder-id order, so the result does not depend
/// on the order of `maps`.
AggregationResult aggregate(std::span<const FcmModel* const> maps, std::span<const double> cw,
                            const AggregateOptions& options = {});
AggregationResult aggregate(std::span<const FcmModel> maps, std::span<const double> cw,
                            const AggregateOptions& options = {});

/// Weights each map by its consensus centrality first.
AggregationResult aggregate_by_credibility(std::span<const FcmModel* const> maps,
                                           const CentralityOptions& centrality = {},
                                           const AggregateOptions& options = {});

/// Natural ordering used for ids outside a hierarchy ("c_2" < "c_10").
bool natural_less(const std::string& a, const std::string& b);

}  // namespace fcm
