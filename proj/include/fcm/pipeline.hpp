#pragma once

// Corpus-level pipeline: load stakeholder maps, condense them up the
// hierarchy, aggregate group and social maps per level, and run the
// drill-down / ranking protocol over the social maps.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/appropriateness.hpp"
#include "fcm/centrality.hpp"
#include "fcm/hierarchy.hpp"
#include "fcm/model.hpp"
#include "fcm/model_io.hpp"
#include "fcm/simulation.hpp"

namespace fcm {

struct PipelineOptions {
  CentralityOptions centrality;
  /// Build the social map from the group maps instead of directly from the
  /// individual maps.
  bool social_from_groups = false;
  /// Worker threads for per-map and per-scenario work; 0 picks the hardware
  /// concurrency. Results do not depend on this value.
  unsigned threads = 0;
};

/// Maps of one level.
struct LevelMaps {
  /// One per stakeholder, in manifest order.
  std::vector<FcmModel> individual;
  /// One per stakeholder group present, in the canonical group order.
  std::vector<FcmModel> groups;
  std::optional<FcmModel> social;
};

/// Every map of the manifest, in manifest order, parsed in parallel.
std::vector<FcmModel> load_maps(const CorpusManifest& manifest, unsigned threads = 0);
/// The manifest's hierarchy file, or the bundled hierarchy when it names none.
CondensationHierarchy load_hierarchy(const CorpusManifest& manifest);

/// Each map condensed one level up with its own node credibility weights,
/// in parallel, in input order.
std::vector<FcmModel> condense_maps(std::span<const FcmModel* const> maps, const CondensationHierarchy& h,
                                    const PipelineOptions& options = {});

/// "<level>.<stakeholder>", "<level>.<group>" or "<level>.social".
std::string model_id(const FcmModel& m);

/// Immutable once built; safe to share across threads.
class Corpus {
 public:
  static Corpus load(const std::filesystem::path& manifest_path, const PipelineOptions& options = {});
  static Corpus load(const CorpusManifest& manifest, const PipelineOptions& options = {});
  /// `maps` may mix levels; lower-level maps are condensed for stakeholders
  /// that lack a map at a higher level.
  static Corpus build(std::vector<FcmModel> maps, CondensationHierarchy hierarchy,
                      const PipelineOptions& options = {});

  const CondensationHierarchy& hierarchy() const noexcept { return hierarchy_; }
  const PipelineOptions& options() const noexcept { return options_; }
  const LevelMaps& level(Level level) const { return levels_[static_cast<std::size_t>(level)]; }

  /// Every model, level by level (variables first): social, groups, individuals.
  std::vector<std::string> model_ids() const;
  const FcmModel* find(std::string_view id) const;
  /// not_found when absent.
  const FcmModel& model(std::string_view id) const;
  /// pipeline error when the level has no maps.
  const FcmModel& social(Level level) const;

  /// Notes raised while building (exact cancellations, fallbacks).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  Corpus(CondensationHierarchy hierarchy, PipelineOptions options)
      : hierarchy_(std::move(hierarchy)), options_(options) {}

  CondensationHierarchy hierarchy_;
  PipelineOptions options_;
  LevelMaps levels_[3];
  std::vector<std::string> warnings_;
};

/// Map weights for aggregation: consensus centrality of each map, or equal
/// weights (with a warning) when the maps are too small or all flat.
std::vector<double> map_weights(std::span<const FcmModel* const> maps, const CentralityOptions& options,
                                std::vector<std::string>* warnings = nullptr);

struct DrillScenario {
  std::string node_id;
  ScenarioSpec spec;
  SimulationResult result;
  ScenarioComparison comparison;
};

struct DrillBatch {
  std::string parent_id;
  /// Level of the clamped nodes.
  Level level = Level::key_variables;
  std::string model_id;
  ScenarioSpec baseline_spec;
  SimulationResult baseline;
  std::vector<DrillScenario> scenarios;
  std::vector<std::string> warnings;

  nlohmann::json to_json(bool trajectories = false) const;
};

/// One clamp-one scenario per child of `parent_id`, run on the social map of
/// the children's level against the template baseline.
DrillBatch drill_down(const Corpus& corpus, std::string_view parent_id, const ScenarioSpec& spec_template = {},
                      double clamp_value = 1.0);

struct RankResult {
  DrillBatch batch;
  TargetSets targets;
  AppropriatenessReport report;

  nlohmann::json to_json() const;
};

/// Drill down, then score the children with credibility and mention counts
/// from the social map. Default target sets are restricted to nodes present
/// in that map.
RankResult rank_children(const Corpus& corpus, std::string_view parent_id, const ScenarioSpec& spec_template = {},
                         const CriterionWeights& weights = {}, const std::optional<TargetSets>& targets = {});

}  // namespace fcm
