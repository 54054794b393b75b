#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/model.hpp"

namespace fcm {

/// Strict three-level tree: concepts -> key variables -> variables.
class CondensationHierarchy {
 public:
  struct Entry {
    std::string id;
    std::string label;
    Level level = Level::variables;
    std::optional<std::string> parent;
    std::vector<std::string> children;
  };

  /// {levels:[...], concepts:[{id,label,key_variables:[{id,label,variables:[{id,label}]}]}]}
  static CondensationHierarchy from_json(const nlohmann::json& doc);
  static CondensationHierarchy load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// The 13 concept / 42 key-variable / 186 variable water-scarcity grouping.
  static const CondensationHierarchy& water_scarcity();

  /// Evenly split synthetic tree with ids following the same scheme
  /// (A, B, ...; AA, AB, ...; AA1, AA2, ...).
  static CondensationHierarchy synthetic(std::size_t variables, std::size_t key_variables,
                                         std::size_t concepts);

  bool contains(std::string_view id) const;
  const Entry& entry(std::string_view id) const;
  Level level_of(std::string_view id) const { return entry(id).level; }
  const std::optional<std::string>& parent_of(std::string_view id) const { return entry(id).parent; }
  const std::vector<std::string>& children_of(std::string_view id) const {
    return entry(id).children;
  }
  /// Ids at a level, in tree order.
  const std::vector<std::string>& ids_at(Level level) const;
  /// Ancestor (or self) of `id` at `level`.
  std::string ancestor_at(std::string_view id, Level level) const;
  /// All nodes below (or equal to) `id` that sit at `level`, in tree order.
  std::vector<std::string> descendants_at(std::string_view id, Level level) const;

  /// Every node of `model` must be a hierarchy node at the model's level.
  void validate_model(const FcmModel& model) const;

  /// Node list for `ids` with labels, levels and parent groups filled in.
  std::vector<ConceptNode> describe(const std::vector<std::string>& ids) const;

 private:
  void add(Entry entry);
  void validate() const;

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> by_level_[3];
};

}  // namespace fcm
