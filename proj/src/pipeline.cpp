#include "fcm/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fcm/aggregation.hpp"
#include "fcm/condensation.hpp"
#include "fcm/errors.hpp"
#include "parallel.hpp"

namespace fcm {

namespace {

constexpr Level kLevels[] = {Level::variables, Level::key_variables, Level::concepts};

std::size_t slot(Level level) { return static_cast<std::size_t>(level); }

std::vector<const FcmModel*> pointers(const std::vector<FcmModel>& maps) {
  std::vector<const FcmModel*> out;
  out.reserve(maps.size());
  for (const auto& m : maps) out.push_back(&m);
  return out;
}

// Individual maps carry the corpus-wide count of maps mentioning each node.
void stamp_mentions(std::vector<FcmModel>& maps) {
  std::map<std::string, int> count;
  for (const auto& m : maps) {
    for (const auto& node : m.nodes()) ++count[node.id];
  }
  for (auto& m : maps) {
    auto nodes = m.nodes();
    for (auto& node : nodes) node.mention_count = count[node.id];
    m = m.with_nodes(std::move(nodes));
  }
}

}  // namespace

std::string model_id(const FcmModel& m) {
  return std::string(to_string(m.level())) + "." + m.provenance().stakeholder_id;
}

std::vector<double> map_weights(std::span<const FcmModel* const> maps, const CentralityOptions& options,
                                std::vector<std::string>* warnings) {
  const bool measurable = std::all_of(maps.begin(), maps.end(), [](const FcmModel* m) { return m->size() >= 4; });
  if (measurable) {
    try {
      return fcm_credibility_weights(maps, options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_input) throw;
    }
  }
  if (warnings) {
    warnings->push_back("map centrality unavailable for " + std::to_string(maps.size()) +
                        " maps at one level; using equal map weights");
  }
  return std::vector<double>(maps.size(), 1.0 / static_cast<double>(maps.size()));
}

Corpus Corpus::load(const std::filesystem::path& manifest_path, const PipelineOptions& options) {
  return load(CorpusManifest::load(manifest_path), options);
}

std::vector<FcmModel> load_maps(const CorpusManifest& manifest, unsigned threads) {
  manifest.validate();
  std::vector<FcmModel> maps(manifest.entries.size(), FcmModel({}, WeightMatrix(0), {}));
  detail::parallel_for(manifest.entries.size(), threads,
                       [&](std::size_t k) { maps[k] = load_fcm(manifest, manifest.entries[k]); });
  return maps;
}

CondensationHierarchy load_hierarchy(const CorpusManifest& manifest) {
  return manifest.hierarchy ? CondensationHierarchy::load(manifest.resolve(*manifest.hierarchy))
                            : CondensationHierarchy::water_scarcity();
}

std::vector<FcmModel> condense_maps(std::span<const FcmModel* const> maps, const CondensationHierarchy& h,
                                    const PipelineOptions& options) {
  std::vector<FcmModel> out(maps.size(), FcmModel({}, WeightMatrix(0), {}));
  detail::parallel_for(maps.size(), options.threads,
                       [&](std::size_t k) { out[k] = condense(*maps[k], h, options.centrality); });
  return out;
}

Corpus Corpus::load(const CorpusManifest& manifest, const PipelineOptions& options) {
  auto maps = load_maps(manifest, options.threads);
  return build(std::move(maps), load_hierarchy(manifest), options);
}

Corpus Corpus::build(std::vector<FcmModel> maps, CondensationHierarchy hierarchy, const PipelineOptions& options) {
  if (maps.empty()) fail(ErrorKind::pipeline, "the corpus has no maps");
  options.centrality.weights.validate();
  Corpus corpus(std::move(hierarchy), options);
  const auto& h = corpus.hierarchy_;

  std::set<std::string> reserved{"social"};
  for (auto g : kStakeholderGroups) reserved.emplace(g);
  std::set<std::string> seen[3];
  for (auto& m : maps) {
    const auto& p = m.provenance();
    if (reserved.count(p.stakeholder_id)) {
      fail(ErrorKind::consistency, "stakeholder id '" + p.stakeholder_id + "' is reserved for aggregate maps");
    }
    if (!is_known_group(p.group_id)) {
      fail(ErrorKind::consistency, "map " + p.stakeholder_id + " has unknown group '" + p.group_id + "'");
    }
    if (!seen[slot(m.level())].insert(p.stakeholder_id).second) {
      fail(ErrorKind::consistency, "stakeholder " + p.stakeholder_id + " has two " +
                                       std::string(to_string(m.level())) + " maps");
    }
    h.validate_model(m);
    corpus.levels_[slot(m.level())].individual.push_back(std::move(m));
  }

  // Condense upwards for stakeholders without a map of their own at the next level.
  for (std::size_t k = 0; k + 1 < 3; ++k) {
    const auto& lower = corpus.levels_[k].individual;
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!seen[k + 1].count(lower[i].provenance().stakeholder_id)) todo.push_back(i);
    }
    std::vector<const FcmModel*> sources;
    for (auto i : todo) sources.push_back(&lower[i]);
    auto condensed = condense_maps(sources, h, options);
    auto& upper = corpus.levels_[k + 1].individual;
    // condensed maps first, in the order of the level below; given maps after
    std::vector<FcmModel> merged(std::make_move_iterator(condensed.begin()), std::make_move_iterator(condensed.end()));
    for (auto& m : upper) merged.push_back(std::move(m));
    upper = std::move(merged);
    for (const auto& m : upper) seen[k + 1].insert(m.provenance().stakeholder_id);
  }

  for (Level level : kLevels) {
    auto& maps_at = corpus.levels_[slot(level)];
    if (maps_at.individual.empty()) continue;
    stamp_mentions(maps_at.individual);
    const auto note = [&](const std::string& id, const std::vector<std::string>& messages) {
      for (const auto& msg : messages) corpus.warnings_.push_back(id + ": " + msg);
    };

    for (auto group : kStakeholderGroups) {
      std::vector<const FcmModel*> members;
      for (const auto& m : maps_at.individual) {
        if (m.provenance().group_id == group) members.push_back(&m);
      }
      if (members.empty()) continue;
      std::vector<std::string> notes;
      const auto cw = map_weights(members, options.centrality, &notes);
      AggregateOptions agg{std::string(group), std::string(group), "group", &h};
      auto result = aggregate(members, cw, agg);
      note(model_id(result.model), notes);
      note(model_id(result.model), result.warnings);
      maps_at.groups.push_back(std::move(result.model));
    }

    const auto sources = options.social_from_groups ? pointers(maps_at.groups) : pointers(maps_at.individual);
    std::vector<std::string> notes;
    const auto cw = map_weights(sources, options.centrality, &notes);
    auto social = aggregate(sources, cw, {"social", "aggregate", "social", &h});
    note(model_id(social.model), notes);
    note(model_id(social.model), social.warnings);
    maps_at.social = std::move(social.model);
  }
  return corpus;
}

std::vector<std::string> Corpus::model_ids() const {
  std::vector<std::string> out;
  for (Level level : kLevels) {
    const auto& maps = levels_[slot(level)];
    if (maps.social) out.push_back(model_id(*maps.social));
    for (const auto& m : maps.groups) out.push_back(model_id(m));
    for (const auto& m : maps.individual) out.push_back(model_id(m));
  }
  return out;
}

const FcmModel* Corpus::find(std::string_view id) const {
  for (Level level : kLevels) {
    const auto& maps = levels_[slot(level)];
    if (maps.social && model_id(*maps.social) == id) return &*maps.social;
    for (const auto& m : maps.groups) {
      if (model_id(m) == id) return &m;
    }
    for (const auto& m : maps.individual) {
      if (model_id(m) == id) return &m;
    }
  }
  return nullptr;
}

const FcmModel& Corpus::model(std::string_view id) const {
  if (const auto* m = find(id)) return *m;
  fail(ErrorKind::not_found, "no model '" + std::string(id) + "'");
}

const FcmModel& Corpus::social(Level level) const {
  const auto& maps = levels_[slot(level)];
  if (!maps.social) fail(ErrorKind::pipeline, "the corpus has no " + std::string(to_string(level)) + " maps");
  return *maps.social;
}

// ------------------------------------------------------------------ drill down

namespace {

TargetSets present_targets(const CondensationHierarchy& h, Level level, const std::vector<std::string>& candidates,
                           const FcmModel& m) {
  auto sets = default_targets(h, level, candidates);
  const auto keep = [&](std::vector<std::string>& ids) {
    std::erase_if(ids, [&](const std::string& id) { return !m.find(id); });
  };
  keep(sets.economic_nodes);
  for (auto& g : sets.targets) keep(g.node_ids);
  std::erase_if(sets.targets, [](const TargetGroup& g) { return g.node_ids.empty(); });
  return sets;
}

}  // namespace

DrillBatch drill_down(const Corpus& corpus, std::string_view parent_id, const ScenarioSpec& spec_template,
                      double clamp_value) {
  const auto& h = corpus.hierarchy();
  if (!h.contains(parent_id)) fail(ErrorKind::not_found, "no hierarchy node '" + std::string(parent_id) + "'");
  const Level parent_level_value = h.level_of(parent_id);
  if (parent_level_value == Level::variables) {
    fail(ErrorKind::usage, "'" + std::string(parent_id) + "' is a variable; there is no level below it");
  }
  spec_template.validate();
  ScenarioSpec clamp_check;
  clamp_check.clamps["x"] = clamp_value;
  clamp_check.validate();

  DrillBatch batch;
  batch.parent_id = parent_id;
  batch.level = parent_level_value == Level::concepts ? Level::key_variables : Level::variables;
  const auto& m = corpus.social(batch.level);
  batch.model_id = model_id(m);
  batch.baseline_spec = spec_template;

  std::vector<std::string> children;
  for (const auto& child : h.children_of(parent_id)) {
    if (m.find(child)) {
      children.push_back(child);
    } else {
      batch.warnings.push_back("'" + child + "' is not in " + batch.model_id + "; no scenario for it");
    }
  }
  if (h.children_of(parent_id).empty()) {
    batch.warnings.push_back("'" + std::string(parent_id) + "' has no children; nothing to drill into");
  }

  const auto targets = present_targets(h, batch.level, children, m);
  std::vector<std::string> target_ids = targets.economic_nodes;
  for (const auto& g : targets.targets) target_ids.insert(target_ids.end(), g.node_ids.begin(), g.node_ids.end());

  batch.baseline = run(m, spec_template, &h);
  batch.scenarios.resize(children.size());
  detail::parallel_for(children.size(), corpus.options().threads, [&](std::size_t k) {
    auto& s = batch.scenarios[k];
    s.node_id = children[k];
    s.spec = spec_template;
    s.spec.clamps[children[k]] = clamp_value;
    s.result = run(m, s.spec, &h);
    s.comparison = compare(batch.baseline, s.result, target_ids);
  });
  return batch;
}

nlohmann::json DrillBatch::to_json(bool trajectories) const {
  const auto result_json = [&](const SimulationResult& r) {
    auto doc = r.to_json();
    if (!trajectories) doc.erase("trajectory");
    return doc;
  };
  nlohmann::json scenarios_doc = nlohmann::json::array();
  for (const auto& s : scenarios) {
    scenarios_doc.push_back({{"node", s.node_id},
                             {"spec", s.spec.to_json()},
                             {"result", result_json(s.result)},
                             {"comparison", s.comparison.to_json()}});
  }
  return {{"parent", parent_id},
          {"level", to_string(level)},
          {"model", model_id},
          {"baseline_spec", baseline_spec.to_json()},
          {"baseline", result_json(baseline)},
          {"scenarios", std::move(scenarios_doc)},
          {"warnings", warnings}};
}

RankResult rank_children(const Corpus& corpus, std::string_view parent_id, const ScenarioSpec& spec_template,
                         const CriterionWeights& weights, const std::optional<TargetSets>& targets) {
  weights.validate();
  RankResult out;
  out.batch = drill_down(corpus, parent_id, spec_template);
  const auto& m = corpus.social(out.batch.level);

  std::vector<std::string> candidates;
  std::vector<ScenarioComparison> comparisons;
  for (const auto& s : out.batch.scenarios) {
    candidates.push_back(s.node_id);
    comparisons.push_back(s.comparison);
  }
  if (candidates.empty()) fail(ErrorKind::degenerate_input, "'" + std::string(parent_id) + "' has no candidates to rank");

  const auto node_cw = node_credibility_weights(m, corpus.options().centrality);
  std::vector<double> cw;
  std::vector<double> mentions;
  for (const auto& id : candidates) {
    const auto i = m.index_of(id);
    cw.push_back(node_cw[i]);
    mentions.push_back(static_cast<double>(m.node(i).mention_count));
  }
  out.targets = targets ? *targets : present_targets(corpus.hierarchy(), out.batch.level, candidates, m);
  out.report = rank_candidates(candidates, cw, mentions, comparisons, out.targets, weights);
  return out;
}

nlohmann::json RankResult::to_json() const {
  auto doc = report.to_json();
  doc["parent"] = batch.parent_id;
  doc["level"] = to_string(batch.level);
  doc["model"] = batch.model_id;
  doc["target_sets"] = targets.to_json();
  doc["warnings"] = batch.warnings;
  return doc;
}

}  // namespace fcm
