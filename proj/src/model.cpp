#include "fcm/model.hpp"

#include <algorithm>
#include <cmath>

#include "fcm/errors.hpp"

namespace fcm {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::variables: return "variables";
    case Level::key_variables: return "key_variables";
    case Level::concepts: return "concepts";
  }
  return "variables";
}

Level parse_level(std::string_view text) {
  if (text == "variables" || text == "variable") return Level::variables;
  if (text == "key_variables" || text == "key_variable") return Level::key_variables;
  if (text == "concepts" || text == "concept") return Level::concepts;
  fail(ErrorKind::configuration, "unknown level '" + std::string(text) + "'");
}

std::optional<Level> parent_level(Level level) {
  switch (level) {
    case Level::variables: return Level::key_variables;
    case Level::key_variables: return Level::concepts;
    case Level::concepts: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::numeric_1: return "numeric_1";
    case SourceFormat::numeric_10: return "numeric_10";
    case SourceFormat::linguistic_13: return "linguistic_13";
    case SourceFormat::linguistic_11: return "linguistic_11";
    case SourceFormat::beta: return "beta";
  }
  return "beta";
}

SourceFormat parse_source_format(std::string_view text) {
  if (text == "numeric_1") return SourceFormat::numeric_1;
  if (text == "numeric_10") return SourceFormat::numeric_10;
  if (text == "linguistic_13") return SourceFormat::linguistic_13;
  if (text == "linguistic_11") return SourceFormat::linguistic_11;
  if (text == "beta") return SourceFormat::beta;
  fail(ErrorKind::configuration, "unknown source format '" + std::string(text) + "'");
}

bool is_known_group(std::string_view group) {
  if (group == "aggregate") return true;
  return std::find(std::begin(kStakeholderGroups), std::end(kStakeholderGroups), group) !=
         std::end(kStakeholderGroups);
}

FcmModel::FcmModel(std::vector<ConceptNode> nodes, WeightMatrix weights, Provenance provenance)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), provenance_(std::move(provenance)) {
  const std::size_t n = nodes_.size();
  if (weights_.size() != n) {
    fail(ErrorKind::shape, "weight matrix is " + std::to_string(weights_.size()) + "x" +
                               std::to_string(weights_.size()) + " but the map has " +
                               std::to_string(n) + " nodes");
  }
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].id.empty()) fail(ErrorKind::validation, "node ids must be non-empty");
    if (!index_.emplace(nodes_[i].id, i).second) {
      fail(ErrorKind::validation, "duplicate node id '" + nodes_[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      fail(ErrorKind::validation, "self-loop on node '" + nodes_[i].id + "'");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || std::abs(w) > kMaxBeta) {
        fail(ErrorKind::input_range, "weight " + nodes_[i].id + "->" + nodes_[j].id +
                                         " outside [-6, 6]");
      }
    }
  }
}

std::optional<std::size_t> FcmModel::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FcmModel::index_of(std::string_view id) const {
  if (auto index = find(id)) return *index;
  fail(ErrorKind::not_found, "unknown node id '" + std::string(id) + "'");
}

std::vector<std::string> FcmModel::ids() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& node : nodes_) out.push_back(node.id);
  return out;
}

std::size_t FcmModel::edge_count() const {
  return static_cast<std::size_t>(std::count_if(weights_.values().begin(), weights_.values().end(),
                                                [](double w) { return w != 0.0; }));
}

FcmModel FcmModel::with_provenance(Provenance provenance) const {
  return FcmModel(nodes_, weights_, std::move(provenance));
}

FcmModel FcmModel::with_nodes(std::vector<ConceptNode> nodes) const {
  return FcmModel(std::move(nodes), weights_, provenance_);
}

double density(const FcmModel& model) {
  const auto n = static_cast<double>(model.size());
  if (model.size() < 2) fail(ErrorKind::degenerate_input, "density needs at least 2 nodes");
  return static_cast<double>(model.edge_count()) / (n * (n - 1.0));
}

}  // namespace fcm
