#pragma once

// Auto-associative simulation of a map: synchronous logistic updates from an
// initial state, optionally holding some nodes clamped, until the state stops
// changing.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/hierarchy.hpp"
#include "fcm/model.hpp"

namespace fcm {

struct ScenarioSpec {
  /// Per-node starting values; nodes not listed start at `default_state`.
  std::map<std::string, double> initial_state;
  /// Named set of starting values applied before `initial_state`.
  std::optional<std::string> preset;
  std::map<std::string, double> clamps;
  double lambda = 1.0;
  double tolerance = 1e-5;
  int max_iterations = 1000;
  /// Weights are divided by this before use (beta / 6 lands in [-1, 1]).
  double weight_scale = 6.0;
  double default_state = 0.5;

  /// Range checks that do not need a model.
  void validate() const;
  /// Also checks that every referenced node exists in `m`.
  void validate_for(const FcmModel& m) const;

  nlohmann::json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& doc);
  /// Stable text form covering every field; equal specs give equal strings.
  std::string canonical() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Initial values of a named preset, by node id. Known presets:
///   "uniform"      every node 0.5
///   "jordan-2013"  concept-level starting values A..M (L defaults to 0.5);
///                  lower-level nodes inherit the value of their concept.
std::map<std::string, double> preset_values(std::string_view name);
std::vector<std::string> preset_names();

struct SimulationResult {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> trajectory;
  std::vector<double> steady_state;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> clamped;

  nlohmann::json to_json() const;
};

/// Starting vector for `m` under `spec` (clamps already applied).
std::vector<double> initial_vector(const FcmModel& m, const ScenarioSpec& spec,
                                   const CondensationHierarchy* h = nullptr);

/// One synchronous update: x_i = sum_j A_j w_ji / weight_scale, A_i' = 1 / (1 + e^{-lambda x_i}),
/// then clamped entries are overwritten.
std::vector<double> step(const FcmModel& m, std::span<const double> state, const ScenarioSpec& spec);

SimulationResult run(const FcmModel& m, const ScenarioSpec& spec, const CondensationHierarchy* h = nullptr);

struct NodeDelta {
  std::string id;
  double baseline = 0.0;
  double policy = 0.0;
  double delta = 0.0;
};

struct ScenarioComparison {
  std::vector<NodeDelta> nodes;
  /// Subset of `nodes` for the requested target ids, in request order.
  std::vector<NodeDelta> targets;
  std::vector<std::string> clamped;

  double delta_of(std::string_view id) const;
  nlohmann::json to_json() const;
  /// id,baseline,policy,delta
  std::string to_csv() const;
};

/// policy - baseline, node by node. Both runs must have converged over the
/// same node ids (usage error otherwise).
ScenarioComparison compare(const SimulationResult& baseline, const SimulationResult& policy,
                           const std::vector<std::string>& target_ids = {});

}  // namespace fcm
