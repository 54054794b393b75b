#pragma once

// Settings shared by every subcommand. Values come from built-in defaults,
// then an optional JSON config file, then command-line flags, each layer
// overriding the one before.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "fcm/appropriateness.hpp"
#include "fcm/centrality.hpp"
#include "fcm/model_io.hpp"
#include "fcm/pipeline.hpp"
#include "fcm/simulation.hpp"

namespace fcm::cli {

struct PipelineConfig {
  std::optional<std::filesystem::path> manifest;
  /// Overrides the hierarchy named by the manifest.
  std::optional<std::filesystem::path> hierarchy;
  /// Source format name -> term-set JSON, applied to manifest entries that
  /// do not name their own term set.
  std::map<std::string, std::filesystem::path> term_sets;
  PrioritizationWeights prioritization;
  EdgeLength edge_length = EdgeLength::inverse;
  CriterionWeights criterion_weights;
  /// Simulation defaults; clamps and initial states are per run.
  ScenarioSpec scenario;
  /// Named presets beyond the built-in ones: node id -> starting value.
  /// Nodes not listed inherit the value of their concept when it is listed.
  std::map<std::string, std::map<std::string, double>> presets;
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;
  bool social_from_groups = false;

  /// Unknown keys and malformed values are configuration errors. Relative
  /// paths are taken relative to `base_dir`.
  void merge_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  void load_file(const std::filesystem::path& path);
  void validate() const;
  nlohmann::json to_json() const;

  CentralityOptions centrality() const;
  PipelineOptions pipeline() const;
  /// The manifest with the hierarchy override and term-set bindings applied.
  CorpusManifest load_manifest(const std::filesystem::path& path) const;
  /// Custom presets expand into initial states for the nodes of `m`;
  /// built-in presets pass through unchanged.
  ScenarioSpec resolve_presets(ScenarioSpec spec, const FcmModel& m, const CondensationHierarchy& h) const;
};

}  // namespace fcm::cli
