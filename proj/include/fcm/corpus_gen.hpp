#pragma once

// Deterministic synthetic stakeholder corpus: variable-level maps in mixed
// input formats whose social maps reach prescribed edge counts at every
// condensation level.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fcm/hierarchy.hpp"
#include "fcm/model_io.hpp"

namespace fcm {

struct CorpusSpec {
  std::uint64_t seed = 1;
  std::size_t n_maps = 35;
  /// Node counts of the variable, key-variable and concept levels.
  std::array<std::size_t, 3> level_sizes{186, 42, 13};
  /// Distinct directed edges of the social map at each level. Empty entries
  /// are derived: the reference sizes use 2682 / 771 / 135, other sizes the
  /// matching densities.
  std::array<std::size_t, 3> edge_counts{0, 0, 0};
  /// Chance that an edge also appears in each map other than its owner.
  double share_probability = 0.05;
  /// Chance that a stakeholder reverses the consensus sign of an edge.
  double dissent_probability = 0.05;

  void validate() const;
  bool reference_sizes() const { return level_sizes == std::array<std::size_t, 3>{186, 42, 13}; }
  /// Edge budget per level after defaults are filled in.
  std::array<std::size_t, 3> edge_budget() const;
};

struct SyntheticCorpus {
  CondensationHierarchy hierarchy;
  CorpusManifest manifest;
  /// Relative path -> file content, for every file of the corpus.
  std::map<std::string, std::string> files;
  /// Distinct edges per level of the generated support.
  std::array<std::size_t, 3> support_edges{0, 0, 0};
};

/// Builds the corpus in memory; the same spec always gives the same bytes.
SyntheticCorpus make_synthetic_corpus(const CorpusSpec& spec);

/// Writes every file under `dir` and returns the manifest path.
std::filesystem::path write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

/// make + write in one step.
std::filesystem::path generate_synthetic_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

}  // namespace fcm
