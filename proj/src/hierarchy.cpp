#include "fcm/hierarchy.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "reference_data.hpp"

namespace fcm {

namespace {

std::size_t level_slot(Level level) { return static_cast<std::size_t>(level); }

std::string letters(std::size_t index) {
  if (index >= 26) fail(ErrorKind::configuration, "synthetic hierarchy supports at most 26 groups per parent");
  return std::string(1, static_cast<char>('A' + index));
}

}  // namespace

void CondensationHierarchy::add(Entry entry) {
  if (!index_.emplace(entry.id, entries_.size()).second) {
    fail(ErrorKind::hierarchy, "duplicate hierarchy id '" + entry.id + "'");
  }
  by_level_[level_slot(entry.level)].push_back(entry.id);
  if (entry.parent) {
    entries_[index_.at(*entry.parent)].children.push_back(entry.id);
  }
  entries_.push_back(std::move(entry));
}

CondensationHierarchy CondensationHierarchy::from_json(const nlohmann::json& doc) {
  CondensationHierarchy h;
  try {
    for (const auto& concept_doc : doc.at("concepts")) {
      const auto concept_id = concept_doc.at("id").get<std::string>();
      h.add({concept_id, concept_doc.value("label", concept_id), Level::concepts, std::nullopt, {}});
      for (const auto& kv_doc : concept_doc.value("key_variables", nlohmann::json::array())) {
        const auto kv_id = kv_doc.at("id").get<std::string>();
        h.add({kv_id, kv_doc.value("label", kv_id), Level::key_variables, concept_id, {}});
        for (const auto& var_doc : kv_doc.value("variables", nlohmann::json::array())) {
          const auto var_id = var_doc.at("id").get<std::string>();
          h.add({var_id, var_doc.value("label", var_id), Level::variables, kv_id, {}});
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::hierarchy, std::string("invalid hierarchy document: ") + e.what());
  }
  h.validate();
  return h;
}

CondensationHierarchy CondensationHierarchy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open hierarchy file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::hierarchy, "malformed hierarchy JSON in " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json CondensationHierarchy::to_json() const {
  nlohmann::json concepts = nlohmann::json::array();
  for (const auto& concept_id : ids_at(Level::concepts)) {
    const auto& c = entry(concept_id);
    nlohmann::json kvs = nlohmann::json::array();
    for (const auto& kv_id : c.children) {
      const auto& kv = entry(kv_id);
      nlohmann::json vars = nlohmann::json::array();
      for (const auto& var_id : kv.children) vars.push_back({{"id", var_id}, {"label", entry(var_id).label}});
      kvs.push_back({{"id", kv_id}, {"label", kv.label}, {"variables", std::move(vars)}});
    }
    concepts.push_back({{"id", concept_id}, {"label", c.label}, {"key_variables", std::move(kvs)}});
  }
  return {{"levels", {"variables", "key_variables", "concepts"}}, {"concepts", std::move(concepts)}};
}

void CondensationHierarchy::validate() const {
  for (const auto& e : entries_) {
    if (e.level != Level::concepts && !e.parent) {
      fail(ErrorKind::hierarchy, "node '" + e.id + "' has no parent group");
    }
    if (e.parent && parent_level(e.level) != entry(*e.parent).level) {
      fail(ErrorKind::hierarchy, "parent of '" + e.id + "' is not exactly one level up");
    }
  }
}

const CondensationHierarchy& CondensationHierarchy::water_scarcity() {
  static const CondensationHierarchy h =
      from_json(nlohmann::json::parse(detail::water_scarcity_hierarchy_json()));
  return h;
}

CondensationHierarchy CondensationHierarchy::synthetic(std::size_t variables,
                                                       std::size_t key_variables,
                                                       std::size_t concepts) {
  if (concepts == 0 || key_variables < concepts || variables < key_variables) {
    fail(ErrorKind::configuration, "synthetic hierarchy needs 0 < concepts <= key variables <= variables");
  }
  CondensationHierarchy h;
  std::size_t kv_total = 0;
  std::vector<std::string> kv_ids;
  for (std::size_t c = 0; c < concepts; ++c) {
    const auto concept_id = letters(c);
    h.add({concept_id, "Concept " + concept_id, Level::concepts, std::nullopt, {}});
    const std::size_t share = key_variables / concepts + (c < key_variables % concepts ? 1 : 0);
    for (std::size_t k = 0; k < share; ++k, ++kv_total) {
      const auto kv_id = concept_id + letters(k);
      h.add({kv_id, "Key variable " + kv_id, Level::key_variables, concept_id, {}});
      kv_ids.push_back(kv_id);
    }
  }
  for (std::size_t k = 0; k < kv_ids.size(); ++k) {
    const std::size_t share = variables / key_variables + (k < variables % key_variables ? 1 : 0);
    for (std::size_t v = 1; v <= share; ++v) {
      const auto var_id = kv_ids[k] + std::to_string(v);
      h.add({var_id, "Variable " + var_id, Level::variables, kv_ids[k], {}});
    }
  }
  h.validate();
  return h;
}

bool CondensationHierarchy::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const CondensationHierarchy::Entry& CondensationHierarchy::entry(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) fail(ErrorKind::hierarchy, "id '" + std::string(id) + "' is not in the hierarchy");
  return entries_[it->second];
}

const std::vector<std::string>& CondensationHierarchy::ids_at(Level level) const {
  return by_level_[level_slot(level)];
}

std::string CondensationHierarchy::ancestor_at(std::string_view id, Level level) const {
  const Entry* e = &entry(id);
  while (e->level != level) {
    if (!e->parent || static_cast<int>(e->level) > static_cast<int>(level)) {
      fail(ErrorKind::hierarchy, "'" + std::string(id) + "' has no ancestor at level " +
                                     std::string(to_string(level)));
    }
    e = &entry(*e->parent);
  }
  return e->id;
}

std::vector<std::string> CondensationHierarchy::descendants_at(std::string_view id, Level level) const {
  const auto& e = entry(id);
  if (e.level == level) return {e.id};
  if (static_cast<int>(e.level) < static_cast<int>(level)) {
    fail(ErrorKind::hierarchy, "'" + e.id + "' sits below level " + std::string(to_string(level)));
  }
  std::vector<std::string> out;
  for (const auto& child : e.children) {
    auto below = descendants_at(child, level);
    out.insert(out.end(), below.begin(), below.end());
  }
  return out;
}

void CondensationHierarchy::validate_model(const FcmModel& model) const {
  for (const auto& node : model.nodes()) {
    if (!contains(node.id)) {
      fail(ErrorKind::hierarchy, "node '" + node.id + "' is not in the hierarchy");
    }
    if (level_of(node.id) != model.level()) {
      fail(ErrorKind::hierarchy, "node '" + node.id + "' belongs to level " +
                                     std::string(to_string(level_of(node.id))) + ", map is at " +
                                     std::string(to_string(model.level())));
    }
  }
}

std::vector<ConceptNode> CondensationHierarchy::describe(const std::vector<std::string>& ids) const {
  std::vector<ConceptNode> nodes;
  nodes.reserve(ids.size());
  for (const auto& id : ids) {
    const auto& e = entry(id);
    nodes.push_back({e.id, e.label, e.level, 0, e.parent});
  }
  return nodes;
}

}  // namespace fcm
