#pragma once

// Collapse a map onto the next hierarchy level: each group becomes one node
// and the group-to-group weight is a credibility-weighted sum over the
// nonzero cross edges between the two groups.

#include <span>
#include <string_view>
#include <vector>

#include "fcm/centrality.hpp"
#include "fcm/hierarchy.hpp"
#include "fcm/model.hpp"

namespace fcm {

/// cw_n / sum(cw) over the selected nodes of one group.
std::vector<double> renormalize_group_cw(std::span<const double> cws);

/// Condensed weight from group `from` to group `to` (node indices into `m`).
/// Only nodes incident to a nonzero from->to edge take part, and their
/// credibility weights are renormalized within that participating subset.
/// A subset whose weights are all zero is treated as equally credible.
double condensed_weight(std::span<const std::size_t> from, std::span<const std::size_t> to,
                        const FcmModel& m, std::span<const double> node_cw);

/// Same, with groups named by hierarchy ids at the level above `m`.
double condensed_weight(std::string_view from_group, std::string_view to_group, const FcmModel& m,
                        const CondensationHierarchy& h, std::span<const double> node_cw);

/// Condense with explicitly supplied node credibility weights.
FcmModel condense(const FcmModel& m, const CondensationHierarchy& h, std::span<const double> node_cw);

/// Condense using the map's own node credibility weights.
FcmModel condense(const FcmModel& m, const CondensationHierarchy& h, const CentralityOptions& options = {});

}  // namespace fcm
