#include "config.hpp"

#include <array>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/util.hpp"

namespace fcm::cli {

namespace fs = std::filesystem;

namespace {

fs::path rebase(const nlohmann::json& value, const fs::path& base_dir) {
  fs::path p = value.get<std::string>();
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::array<double, 3> triple(const nlohmann::json& value, const char* key) {
  const auto v = value.get<std::vector<double>>();
  if (v.size() != 3) fail(ErrorKind::configuration, std::string(key) + " needs three numbers");
  return {v[0], v[1], v[2]};
}

}  // namespace

void PipelineConfig::merge_json(const nlohmann::json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) fail(ErrorKind::configuration, "config must be a JSON object");
  static const std::set<std::string> known{"manifest",          "hierarchy",   "term_sets",  "prioritization_weights",
                                           "edge_length",       "criterion_weights",         "simulation",
                                           "presets",           "output_dir",  "threads",    "social_from_groups"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) fail(ErrorKind::configuration, "unknown config key '" + key + "'");
  }
  try {
    if (doc.contains("manifest")) manifest = rebase(doc["manifest"], base_dir);
    if (doc.contains("hierarchy")) hierarchy = rebase(doc["hierarchy"], base_dir);
    if (doc.contains("term_sets")) {
      for (const auto& [format, path] : doc["term_sets"].items()) {
        (void)parse_source_format(format);
        term_sets[format] = rebase(path, base_dir);
      }
    }
    if (doc.contains("prioritization_weights")) {
      const auto w = triple(doc["prioritization_weights"], "prioritization_weights");
      prioritization = {w[0], w[1], w[2]};
    }
    if (doc.contains("edge_length")) edge_length = parse_edge_length(doc["edge_length"].get<std::string>());
    if (doc.contains("criterion_weights")) {
      const auto w = triple(doc["criterion_weights"], "criterion_weights");
      criterion_weights = {w[0], w[1], w[2]};
    }
    if (doc.contains("simulation")) {
      const auto& sim = doc["simulation"];
      static const std::set<std::string> sim_keys{"preset", "lambda", "tolerance", "max_iterations",
                                                  "weight_scale", "default_state"};
      for (const auto& [key, value] : sim.items()) {
        if (!sim_keys.count(key)) fail(ErrorKind::configuration, "unknown simulation key '" + key + "'");
      }
      if (sim.contains("preset")) {
        scenario.preset = sim["preset"].is_null() ? std::nullopt : std::optional(sim["preset"].get<std::string>());
      }
      scenario.lambda = sim.value("lambda", scenario.lambda);
      scenario.tolerance = sim.value("tolerance", scenario.tolerance);
      scenario.max_iterations = sim.value("max_iterations", scenario.max_iterations);
      scenario.weight_scale = sim.value("weight_scale", scenario.weight_scale);
      scenario.default_state = sim.value("default_state", scenario.default_state);
    }
    if (doc.contains("presets")) {
      for (const auto& [name, values] : doc["presets"].items()) {
        presets[name] = values.get<std::map<std::string, double>>();
      }
    }
    if (doc.contains("output_dir")) output_dir = rebase(doc["output_dir"], base_dir);
    if (doc.contains("threads")) threads = doc["threads"].get<unsigned>();
    if (doc.contains("social_from_groups")) social_from_groups = doc["social_from_groups"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::configuration, std::string("invalid config: ") + e.what());
  }
}

void PipelineConfig::load_file(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::configuration, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  merge_json(doc, path.parent_path());
}

void PipelineConfig::validate() const {
  try {
    prioritization.validate();
    criterion_weights.validate();
    ScenarioSpec check = scenario;
    // custom presets are checked here rather than against the built-in list
    if (check.preset && presets.count(*check.preset)) check.preset.reset();
    check.validate();
  } catch (const Error& e) {
    fail(ErrorKind::configuration, e.what());
  }
  for (const auto& [name, values] : presets) {
    for (const auto& [id, v] : values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorKind::configuration, "preset " + name + " gives " + id + " a value outside [0, 1]");
      }
    }
  }
  const auto must_exist = [](const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) fail(ErrorKind::configuration, what + " " + p.string() + " does not exist");
  };
  if (manifest) must_exist(*manifest, "manifest");
  if (hierarchy) must_exist(*hierarchy, "hierarchy");
  for (const auto& [format, path] : term_sets) must_exist(path, "term set for " + format);
}

nlohmann::json PipelineConfig::to_json() const {
  const auto opt_path = [](const std::optional<fs::path>& p) {
    return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
  };
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [format, path] : term_sets) bindings[format] = path.generic_string();
  nlohmann::json preset_doc = nlohmann::json::object();
  for (const auto& [name, values] : presets) preset_doc[name] = values;
  return {{"manifest", opt_path(manifest)},
          {"hierarchy", opt_path(hierarchy)},
          {"term_sets", std::move(bindings)},
          {"prioritization_weights", {prioritization.degree, prioritization.closeness, prioritization.betweenness}},
          {"edge_length", to_string(edge_length)},
          {"criterion_weights", {criterion_weights.importance, criterion_weights.feasibility,
                                 criterion_weights.influence}},
          {"simulation",
           {{"preset", scenario.preset ? nlohmann::json(*scenario.preset) : nlohmann::json(nullptr)},
            {"lambda", scenario.lambda},
            {"tolerance", scenario.tolerance},
            {"max_iterations", scenario.max_iterations},
            {"weight_scale", scenario.weight_scale},
            {"default_state", scenario.default_state}}},
          {"presets", std::move(preset_doc)},
          {"output_dir", output_dir.generic_string()},
          {"threads", threads},
          {"social_from_groups", social_from_groups}};
}

CentralityOptions PipelineConfig::centrality() const {
  CentralityOptions options;
  options.weights = prioritization;
  options.edge_length = edge_length;
  return options;
}

PipelineOptions PipelineConfig::pipeline() const {
  PipelineOptions options;
  options.centrality = centrality();
  options.social_from_groups = social_from_groups;
  options.threads = threads;
  return options;
}

CorpusManifest PipelineConfig::load_manifest(const fs::path& path) const {
  auto manifest = CorpusManifest::load(path);
  if (hierarchy) manifest.hierarchy = fs::absolute(*hierarchy);
  for (auto& entry : manifest.entries) {
    const auto it = term_sets.find(std::string(to_string(entry.source_format)));
    if (!entry.term_set && it != term_sets.end()) entry.term_set = fs::absolute(it->second);
  }
  return manifest;
}

ScenarioSpec PipelineConfig::resolve_presets(ScenarioSpec spec, const FcmModel& m,
                                             const CondensationHierarchy& h) const {
  if (!spec.preset) return spec;
  const auto custom = presets.find(*spec.preset);
  if (custom == presets.end()) return spec;
  const auto& values = custom->second;
  for (const auto& node : m.nodes()) {
    auto it = values.find(node.id);
    if (it == values.end() && h.contains(node.id)) it = values.find(h.ancestor_at(node.id, Level::concepts));
    // explicit initial states win over the preset
    if (it != values.end()) spec.initial_state.emplace(node.id, it->second);
  }
  spec.preset.reset();
  return spec;
}

}  // namespace fcm::cli
