#pragma once

// Map persistence: a CSV adjacency matrix (header row and first column hold
// node ids, row = cause, column = effect) plus a JSON sidecar with node
// metadata and provenance, and a manifest listing a corpus of such files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/linguistic.hpp"
#include "fcm/model.hpp"

namespace fcm {

struct ManifestEntry {
  /// Relative paths are resolved against the manifest's directory.
  std::filesystem::path path;
  std::string stakeholder_id;
  std::string group_id;
  Level level = Level::variables;
  SourceFormat source_format = SourceFormat::beta;
  /// Optional term-set document for linguistic cells (labels may differ from
  /// the built-in sets, geometry may not).
  std::optional<std::filesystem::path> term_set;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::optional<std::filesystem::path> hierarchy;
  /// Directory the relative paths are anchored to (not serialized).
  std::filesystem::path base_dir;

  static CorpusManifest from_json(const nlohmann::json& doc, std::filesystem::path base_dir = {});
  static CorpusManifest load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Paths unique, groups known, stakeholder ids present.
  void validate() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

struct LoadOptions {
  /// Overrides the sidecar's declared format.
  std::optional<SourceFormat> source_format;
  /// Overrides stakeholder/group/level/format from the sidecar.
  std::optional<ManifestEntry> entry;
  /// Term set for linguistic labels; defaults to the built-in set of the format.
  std::optional<LinguisticTermSet> term_set;
};

/// Sidecar path for a matrix file: same stem, .json extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Parse CSV text into a model (cells converted to beta per `format`).
FcmModel parse_fcm_csv(std::string_view text, SourceFormat format, const nlohmann::json* sidecar,
                       const LinguisticTermSet* term_set = nullptr);

FcmModel load_fcm(const std::filesystem::path& path, const LoadOptions& options = {});
FcmModel load_fcm(const CorpusManifest& manifest, const ManifestEntry& entry);

/// CSV text of the matrix expressed in `format`. Linguistic formats round each
/// cell to its nearest term and so are lossy.
std::string format_fcm_csv(const FcmModel& model, SourceFormat format);
nlohmann::json sidecar_json(const FcmModel& model, SourceFormat format);

/// Writes `path` (CSV) and its sidecar atomically.
void save_fcm(const FcmModel& model, const std::filesystem::path& path,
              SourceFormat format = SourceFormat::beta);

/// JSON forms shared by the CLI, the service and the Python bindings.
nlohmann::json provenance_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& doc);
nlohmann::json node_json(const ConceptNode& node);
ConceptNode node_from_json(const nlohmann::json& doc, Level fallback_level);
/// Full model including the weight matrix.
nlohmann::json model_json(const FcmModel& model);
FcmModel model_from_json(const nlohmann::json& doc);

}  // namespace fcm
