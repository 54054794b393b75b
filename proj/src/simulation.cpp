#include "fcm/simulation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/util.hpp"

namespace fcm {

namespace {

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::validation, what + " must lie in [0, 1]");
}

double logistic(double x, double lambda) { return 1.0 / (1.0 + std::exp(-lambda * x)); }

}  // namespace

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names() { return {"jordan-2013", "uniform"}; }

std::map<std::string, double> preset_values(std::string_view name) {
  if (name == "uniform") return {};
  if (name == "jordan-2013") {
    return {{"A", 0.33}, {"B", 0.33}, {"C", 1.0},  {"D", 0.33}, {"E", 0.67}, {"F", 0.5},  {"G", 0.67},
            {"H", 0.83}, {"I", 0.67}, {"J", 0.5},  {"K", 0.83}, {"L", 0.5},  {"M", 0.83}};
  }
  fail(ErrorKind::validation, "unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- spec

void ScenarioSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::validation, "lambda must be positive");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) fail(ErrorKind::validation, "tolerance must be positive");
  if (max_iterations < 1) fail(ErrorKind::validation, "max_iterations must be at least 1");
  if (!(weight_scale > 0.0) || !std::isfinite(weight_scale)) fail(ErrorKind::validation, "weight_scale must be positive");
  check_unit(default_state, "default_state");
  for (const auto& [id, v] : initial_state) check_unit(v, "initial state of " + id);
  for (const auto& [id, v] : clamps) check_unit(v, "clamp value of " + id);
  if (preset) preset_values(*preset);
}

void ScenarioSpec::validate_for(const FcmModel& m) const {
  validate();
  for (const auto& [id, v] : initial_state) {
    if (!m.find(id)) fail(ErrorKind::not_found, "initial state names unknown node '" + id + "'");
  }
  for (const auto& [id, v] : clamps) {
    if (!m.find(id)) fail(ErrorKind::not_found, "clamp names unknown node '" + id + "'");
  }
}

nlohmann::json ScenarioSpec::to_json() const {
  nlohmann::json doc = {{"initial_state", initial_state},
                        {"clamps", clamps},
                        {"lambda", lambda},
                        {"tolerance", tolerance},
                        {"max_iterations", max_iterations},
                        {"weight_scale", weight_scale},
                        {"default_state", default_state}};
  doc["preset"] = preset ? nlohmann::json(*preset) : nlohmann::json(nullptr);
  return doc;
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorKind::validation, "scenario must be a JSON object");
  ScenarioSpec spec;
  try {
    if (doc.contains("initial_state")) spec.initial_state = doc.at("initial_state").get<std::map<std::string, double>>();
    if (doc.contains("preset") && !doc.at("preset").is_null()) spec.preset = doc.at("preset").get<std::string>();
    if (doc.contains("clamps")) spec.clamps = doc.at("clamps").get<std::map<std::string, double>>();
    spec.lambda = doc.value("lambda", spec.lambda);
    spec.tolerance = doc.value("tolerance", spec.tolerance);
    spec.max_iterations = doc.value("max_iterations", spec.max_iterations);
    spec.weight_scale = doc.value("weight_scale", spec.weight_scale);
    spec.default_state = doc.value("default_state", spec.default_state);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("invalid scenario: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string ScenarioSpec::canonical() const { return to_json().dump(); }

// ---------------------------------------------------------------- running

std::vector<double> initial_vector(const FcmModel& m, const ScenarioSpec& spec, const CondensationHierarchy* h) {
  spec.validate_for(m);
  std::vector<double> state(m.size(), spec.default_state);
  if (spec.preset) {
    const auto values = preset_values(*spec.preset);
    const auto& hierarchy = h ? *h : CondensationHierarchy::water_scarcity();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& id = m.node(i).id;
      auto it = values.find(id);
      if (it == values.end() && hierarchy.contains(id)) {
        // lower-level nodes start where their concept starts
        it = values.find(hierarchy.ancestor_at(id, Level::concepts));
      }
      if (it != values.end()) state[i] = it->second;
    }
  }
  for (const auto& [id, v] : spec.initial_state) state[m.index_of(id)] = v;
  for (const auto& [id, v] : spec.clamps) state[m.index_of(id)] = v;
  return state;
}

std::vector<double> step(const FcmModel& m, std::span<const double> state, const ScenarioSpec& spec) {
  const std::size_t n = m.size();
  if (state.size() != n) {
    fail(ErrorKind::shape, "state has " + std::to_string(state.size()) + " entries, map has " + std::to_string(n));
  }
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = m.weight(j, i);
      if (w != 0.0) x += state[j] * (w / spec.weight_scale);
    }
    next[i] = logistic(x, spec.lambda);
  }
  for (const auto& [id, v] : spec.clamps) next[m.index_of(id)] = v;
  return next;
}

SimulationResult run(const FcmModel& m, const ScenarioSpec& spec, const CondensationHierarchy* h) {
  SimulationResult result;
  result.ids = m.ids();
  for (const auto& [id, v] : spec.clamps) result.clamped.push_back(id);
  result.trajectory.push_back(initial_vector(m, spec, h));
  for (int t = 1; t <= spec.max_iterations; ++t) {
    auto next = step(m, result.trajectory.back(), spec);
    double change = 0.0;
    const auto& previous = result.trajectory.back();
    for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - previous[i]));
    result.trajectory.push_back(std::move(next));
    result.iterations = t;
    if (change < spec.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.steady_state = result.trajectory.back();
  return result;
}

nlohmann::json SimulationResult::to_json() const {
  return {{"ids", ids},
          {"trajectory", trajectory},
          {"steady_state", steady_state},
          {"iterations", iterations},
          {"converged", converged},
          {"clamped", clamped}};
}

// ---------------------------------------------------------------- comparison

ScenarioComparison compare(const SimulationResult& baseline, const SimulationResult& policy,
                           const std::vector<std::string>& target_ids) {
  if (!baseline.converged) fail(ErrorKind::unconverged, "baseline run did not converge");
  if (!policy.converged) fail(ErrorKind::unconverged, "policy run did not converge");
  if (baseline.ids != policy.ids) fail(ErrorKind::consistency, "runs cover different node sets");
  ScenarioComparison out;
  out.clamped = policy.clamped;
  for (std::size_t i = 0; i < baseline.ids.size(); ++i) {
    out.nodes.push_back({baseline.ids[i], baseline.steady_state[i], policy.steady_state[i],
                         policy.steady_state[i] - baseline.steady_state[i]});
  }
  for (const auto& id : target_ids) {
    const auto it = std::find(baseline.ids.begin(), baseline.ids.end(), id);
    if (it == baseline.ids.end()) fail(ErrorKind::not_found, "unknown target node '" + id + "'");
    out.targets.push_back(out.nodes[static_cast<std::size_t>(it - baseline.ids.begin())]);
  }
  return out;
}

double ScenarioComparison::delta_of(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n.delta;
  }
  fail(ErrorKind::not_found, "no delta for node '" + std::string(id) + "'");
}

nlohmann::json ScenarioComparison::to_json() const {
  const auto rows = [](const std::vector<NodeDelta>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& n : v) {
      out.push_back({{"id", n.id}, {"baseline", n.baseline}, {"policy", n.policy}, {"delta", n.delta}});
    }
    return out;
  };
  return {{"nodes", rows(nodes)}, {"targets", rows(targets)}, {"clamped", clamped}};
}

std::string ScenarioComparison::to_csv() const {
  std::string out = "id,baseline,policy,delta\n";
  for (const auto& n : nodes) {
    out += n.id + "," + format_double(n.baseline) + "," + format_double(n.policy) + "," + format_double(n.delta) + "\n";
  }
  return out;
}

}  // namespace fcm
