#include "fcm/aggregation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fcm/errors.hpp"
#include "fcm/util.hpp"

namespace fcm {

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto da = a.substr(i, ie - i);
      auto db = b.substr(j, je - j);
      da.erase(0, std::min(da.find_first_not_of('0'), da.size()));
      db.erase(0, std::min(db.find_first_not_of('0'), db.size()));
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::vector<std::string> union_node_ids(std::span<const FcmModel* const> maps, const CondensationHierarchy* h) {
  std::set<std::string> ids;
  for (const auto* m : maps) {
    for (const auto& node : m->nodes()) ids.insert(node.id);
  }
  const bool all_in_hierarchy =
      h && std::all_of(ids.begin(), ids.end(), [&](const std::string& id) { return h->contains(id); });
  if (all_in_hierarchy) {
    std::vector<std::string> out;
    for (auto level : {Level::variables, Level::key_variables, Level::concepts}) {
      for (const auto& id : h->ids_at(level)) {
        if (ids.count(id)) out.push_back(id);
      }
    }
    return out;
  }
  std::vector<std::string> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end(), natural_less);
  return out;
}

FcmModel augment(const FcmModel& m, const std::vector<std::string>& union_ids) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < union_ids.size(); ++i) {
    if (!position.emplace(union_ids[i], i).second) {
      fail(ErrorKind::consistency, "union node list repeats '" + union_ids[i] + "'");
    }
  }
  std::vector<std::size_t> target(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto it = position.find(m.node(i).id);
    if (it == position.end()) {
      fail(ErrorKind::consistency, "node '" + m.node(i).id + "' is not in the union node set");
    }
    target[i] = it->second;
  }
  std::vector<ConceptNode> nodes;
  nodes.reserve(union_ids.size());
  for (const auto& id : union_ids) {
    if (auto index = m.find(id)) {
      nodes.push_back(m.node(*index));
    } else {
      nodes.push_back({id, id, m.level(), 0, std::nullopt});
    }
  }
  WeightMatrix w(union_ids.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) w(target[i], target[j]) = m.weight(i, j);
  }
  return FcmModel(std::move(nodes), std::move(w), m.provenance());
}

AggregationResult aggregate(std::span<const FcmModel* const> maps, std::span<const double> cw,
                            const AggregateOptions& options) {
  if (maps.empty()) fail(ErrorKind::degenerate_input, "aggregation needs at least one map");
  if (cw.size() != maps.size()) fail(ErrorKind::shape, "one credibility weight per map is required");
  const Level level = maps.front()->level();
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (maps[k]->level() != level) fail(ErrorKind::consistency, "maps to aggregate must share one level");
    if (!(cw[k] >= 0.0) || !std::isfinite(cw[k])) fail(ErrorKind::input_range, "map weights must be nonnegative");
  }

  // Canonical contributor order: by stakeholder id, ties by original position.
  // Every sum below runs in this order so the bits do not depend on the input order.
  std::vector<std::size_t> order(maps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return maps[a]->provenance().stakeholder_id < maps[b]->provenance().stakeholder_id;
  });
  double total = 0.0;
  for (std::size_t k : order) total += cw[k];
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, "map weights sum to zero");

  const auto ids = union_node_ids(maps, options.hierarchy);
  const std::size_t n = ids.size();
  WeightMatrix sum(n);
  WeightMatrix bound(n);  // max_k |beta_k(i, j)|
  std::vector<bool> supported(n * n, false);
  // Cells where every map carries the same value; their convex combination is
  // that value exactly, whatever rounding the weighted sum picked up.
  WeightMatrix first(n);
  std::vector<bool> uniform(n * n, true);
  std::vector<int> mentions(n, 0);
  std::vector<std::string> contributors;

  for (std::size_t k : order) {
    const auto& m = *maps[k];
    const double weight = cw[k] / total;
    const auto a = augment(m, ids);
    contributors.push_back(m.provenance().stakeholder_id);
    for (std::size_t i = 0; i < n; ++i) {
      if (auto index = m.find(ids[i])) {
        mentions[i] += m.provenance().kind == "individual" ? 1 : m.node(*index).mention_count;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double v = a.weight(i, j);
        if (k == order.front()) {
          first(i, j) = v;
        } else if (v != first(i, j)) {
          uniform[i * n + j] = false;
        }
        if (v == 0.0) continue;
        sum(i, j) += weight * v;
        bound(i, j) = std::max(bound(i, j), std::abs(v));
        supported[i * n + j] = true;
      }
    }
  }

  AggregationResult result{FcmModel({}, WeightMatrix(0), {}), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // A convex combination cannot exceed its largest input; clip rounding.
      sum(i, j) = uniform[i * n + j] ? first(i, j) : std::clamp(sum(i, j), -bound(i, j), bound(i, j));
      if (supported[i * n + j] && sum(i, j) == 0.0) {
        result.warnings.push_back("contributions to " + ids[i] + "->" + ids[j] + " cancel exactly");
      }
    }
  }

  std::vector<ConceptNode> nodes;
  nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ConceptNode node{ids[i], ids[i], level, mentions[i], std::nullopt};
    if (options.hierarchy && options.hierarchy->contains(ids[i])) {
      node = options.hierarchy->describe({ids[i]}).front();
      node.level = level;
      node.mention_count = mentions[i];
    } else {
      for (std::size_t k : order) {
        if (auto index = maps[k]->find(ids[i])) {
          node.label = maps[k]->node(*index).label;
          node.parent_group = maps[k]->node(*index).parent_group;
          break;
        }
      }
    }
    nodes.push_back(std::move(node));
  }

  Provenance provenance;
  provenance.stakeholder_id = options.stakeholder_id;
  provenance.group_id = options.group_id;
  provenance.level = level;
  provenance.source_format = SourceFormat::beta;
  provenance.kind = options.kind;
  provenance.contributors = std::move(contributors);
  result.model = FcmModel(std::move(nodes), std::move(sum), std::move(provenance));
  return result;
}

AggregationResult aggregate(std::span<const FcmModel> maps, std::span<const double> cw,
                            const AggregateOptions& options) {
  std::vector<const FcmModel*> pointers;
  for (const auto& m : maps) pointers.push_back(&m);
  return aggregate(std::span<const FcmModel* const>(pointers), cw, options);
}

AggregationResult aggregate_by_credibility(std::span<const FcmModel* const> maps, const CentralityOptions& centrality,
                                           const AggregateOptions& options) {
  const auto cw = fcm_credibility_weights(maps, centrality);
  return aggregate(maps, cw, options);
}

}  // namespace fcm
