#include "fcm/condensation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fcm/errors.hpp"

namespace fcm {

namespace {

// Renormalized weights of the participating nodes; equal shares when the
// participants carry no credibility at all.
std::vector<double> participant_weights(const std::vector<std::size_t>& participants,
                                        std::span<const double> node_cw) {
  std::vector<double> cws;
  cws.reserve(participants.size());
  for (std::size_t n : participants) cws.push_back(node_cw[n]);
  const double total = std::accumulate(cws.begin(), cws.end(), 0.0);
  if (total > 0.0) return renormalize_group_cw(cws);
  return std::vector<double>(participants.size(), 1.0 / static_cast<double>(participants.size()));
}

}  // namespace

std::vector<double> renormalize_group_cw(std::span<const double> cws) {
  if (cws.empty()) fail(ErrorKind::degenerate_input, "renormalization needs at least one node");
  double total = 0.0;
  for (double c : cws) {
    if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorKind::input_range, "credibility weights must be nonnegative");
    total += c;
  }
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, "credibility weights of the group sum to zero");
  std::vector<double> out(cws.begin(), cws.end());
  for (double& c : out) c /= total;
  return out;
}

double condensed_weight(std::span<const std::size_t> from, std::span<const std::size_t> to, const FcmModel& m,
                        std::span<const double> node_cw) {
  if (node_cw.size() != m.size()) fail(ErrorKind::shape, "one credibility weight per node is required");
  for (std::size_t a : from) {
    if (a >= m.size()) fail(ErrorKind::not_found, "group member index out of range");
    if (std::find(to.begin(), to.end(), a) != to.end()) {
      fail(ErrorKind::invalid_pair, "a group cannot be condensed against itself");
    }
  }
  for (std::size_t b : to) {
    if (b >= m.size()) fail(ErrorKind::not_found, "group member index out of range");
  }
  if (from.empty() && to.empty()) fail(ErrorKind::invalid_pair, "a group cannot be condensed against itself");

  // Nodes of each group incident to at least one nonzero cross edge.
  std::vector<std::size_t> sources;
  std::vector<std::size_t> targets;
  for (std::size_t a : from) {
    if (std::any_of(to.begin(), to.end(), [&](std::size_t b) { return m.weight(a, b) != 0.0; })) sources.push_back(a);
  }
  for (std::size_t b : to) {
    if (std::any_of(from.begin(), from.end(), [&](std::size_t a) { return m.weight(a, b) != 0.0; })) targets.push_back(b);
  }
  if (sources.empty()) return 0.0;

  const auto source_cw = participant_weights(sources, node_cw);
  const auto target_cw = participant_weights(targets, node_cw);
  double total = 0.0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double w = m.weight(sources[s], targets[t]);
      if (w != 0.0) total += source_cw[s] * target_cw[t] * w;
    }
  }
  return total;
}

namespace {

struct Grouping {
  std::vector<std::string> group_ids;
  std::vector<std::vector<std::size_t>> members;
};

// Groups present in `m`, in hierarchy order, members in hierarchy order too so
// that the result does not depend on the node order of the input map.
Grouping group_nodes(const FcmModel& m, const CondensationHierarchy& h) {
  const auto parent = parent_level(m.level());
  if (!parent) fail(ErrorKind::hierarchy, "concept-level maps have no level to condense into");
  for (const auto& node : m.nodes()) {
    if (!h.contains(node.id)) fail(ErrorKind::hierarchy, "node '" + node.id + "' is not in the hierarchy");
    if (h.level_of(node.id) != m.level()) {
      fail(ErrorKind::hierarchy, "node '" + node.id + "' is not a " + std::string(to_string(m.level())) + " node");
    }
    if (!h.parent_of(node.id)) fail(ErrorKind::hierarchy, "node '" + node.id + "' has no parent group");
  }
  Grouping grouping;
  for (const auto& group : h.ids_at(*parent)) {
    std::vector<std::size_t> members;
    for (const auto& child : h.children_of(group)) {
      if (auto index = m.find(child)) members.push_back(*index);
    }
    if (members.empty()) continue;
    grouping.group_ids.push_back(group);
    grouping.members.push_back(std::move(members));
  }
  return grouping;
}

}  // namespace

double condensed_weight(std::string_view from_group, std::string_view to_group, const FcmModel& m,
                        const CondensationHierarchy& h, std::span<const double> node_cw) {
  if (from_group == to_group) fail(ErrorKind::invalid_pair, "a group cannot be condensed against itself");
  const auto members = [&](std::string_view group) {
    std::vector<std::size_t> out;
    for (const auto& child : h.children_of(group)) {
      if (auto index = m.find(child)) out.push_back(*index);
    }
    return out;
  };
  const auto from = members(from_group);
  const auto to = members(to_group);
  return condensed_weight(from, to, m, node_cw);
}

FcmModel condense(const FcmModel& m, const CondensationHierarchy& h, std::span<const double> node_cw) {
  if (node_cw.size() != m.size()) fail(ErrorKind::shape, "one credibility weight per node is required");
  const auto grouping = group_nodes(m, h);
  const std::size_t k = grouping.group_ids.size();
  WeightMatrix w(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;  // intra-group edges do not survive condensation
      const double v = condensed_weight(grouping.members[i], grouping.members[j], m, node_cw);
      w(i, j) = std::clamp(v, -kMaxBeta, kMaxBeta);
    }
  }
  auto provenance = m.provenance();
  provenance.level = *parent_level(m.level());
  provenance.source_map = m.provenance().stakeholder_id + "@" + std::string(to_string(m.level()));
  auto nodes = h.describe(grouping.group_ids);
  return FcmModel(std::move(nodes), std::move(w), std::move(provenance));
}

FcmModel condense(const FcmModel& m, const CondensationHierarchy& h, const CentralityOptions& options) {
  if (m.edge_count() == 0) {
    return condense(m, h, std::vector<double>(m.size(), m.size() ? 1.0 / static_cast<double>(m.size()) : 0.0));
  }
  return condense(m, h, node_credibility_weights(m, options));
}

}  // namespace fcm
