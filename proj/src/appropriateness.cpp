#include "fcm/appropriateness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/util.hpp"

namespace fcm {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

std::vector<double> percent_of_total(std::span<const double> values, const char* what) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::input_range, std::string(what) + " must be nonnegative");
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, std::string(what) + " are zero for every candidate");
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v = v / total * 100.0;
  return out;
}

// Signed values as percentages of their absolute total; all zero stays zero.
std::vector<double> signed_percent(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += std::abs(v);
  std::vector<double> out(values.size(), 0.0);
  if (!(total > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total * 100.0;
  return out;
}

double mean_delta(const ScenarioComparison& c, const std::vector<std::string>& ids, const char* what) {
  double total = 0.0;
  for (const auto& id : ids) {
    const auto it = std::find_if(c.nodes.begin(), c.nodes.end(), [&](const NodeDelta& n) { return n.id == id; });
    if (it == c.nodes.end()) {
      fail(ErrorKind::configuration, std::string(what) + " node '" + id + "' is not in the simulated map");
    }
    total += it->delta;
  }
  return total / static_cast<double>(ids.size());
}

}  // namespace

void CriterionWeights::validate() const {
  for (double w : {importance, feasibility, influence}) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::configuration, "criterion weights must be nonnegative");
  }
  if (std::abs(importance + feasibility + influence - 1.0) > kWeightSumTolerance) {
    fail(ErrorKind::configuration, "criterion weights must sum to 1");
  }
}

CriterionWeights parse_criterion_weights(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) fail(ErrorKind::configuration, "criterion weights need three comma-separated values");
  double values[3];
  for (std::size_t k = 0; k < 3; ++k) {
    const auto v = parse_double(trim(parts[k]));
    if (!v) fail(ErrorKind::configuration, "'" + parts[k] + "' is not a number");
    values[k] = *v;
  }
  CriterionWeights w{values[0], values[1], values[2]};
  w.validate();
  return w;
}

void TargetSets::validate(const std::vector<std::string>& candidates) const {
  if (economic_nodes.empty()) fail(ErrorKind::configuration, "no economic nodes to assess feasibility");
  if (targets.empty()) fail(ErrorKind::configuration, "no target groups to assess influence");
  if (economic_sign != 1 && economic_sign != -1) fail(ErrorKind::configuration, "economic sign must be +1 or -1");
  const std::set<std::string> cohort(candidates.begin(), candidates.end());
  for (const auto& id : economic_nodes) {
    if (cohort.count(id)) fail(ErrorKind::configuration, "candidate '" + id + "' is also an economic node");
  }
  for (const auto& group : targets) {
    if (group.node_ids.empty()) fail(ErrorKind::configuration, "target group '" + group.name + "' is empty");
    if (group.desired_sign != 1 && group.desired_sign != -1) {
      fail(ErrorKind::configuration, "target sign must be +1 or -1");
    }
    for (const auto& id : group.node_ids) {
      if (cohort.count(id)) fail(ErrorKind::configuration, "candidate '" + id + "' is also a target node");
    }
  }
}

nlohmann::json TargetSets::to_json() const {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : targets) groups.push_back({{"name", g.name}, {"nodes", g.node_ids}, {"desired_sign", g.desired_sign}});
  return {{"economic_nodes", economic_nodes}, {"economic_sign", economic_sign}, {"targets", std::move(groups)}};
}

TargetSets TargetSets::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorKind::validation, "target sets must be a JSON object");
  TargetSets sets;
  try {
    sets.economic_nodes = doc.at("economic_nodes").get<std::vector<std::string>>();
    sets.economic_sign = doc.value("economic_sign", 1);
    for (const auto& g : doc.at("targets")) {
      sets.targets.push_back({g.at("name").get<std::string>(), g.at("nodes").get<std::vector<std::string>>(),
                              g.value("desired_sign", 1)});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("invalid target sets: ") + e.what());
  }
  return sets;
}

TargetSets default_targets(const CondensationHierarchy& h, Level level, const std::vector<std::string>& candidates) {
  const std::set<std::string> cohort(candidates.begin(), candidates.end());
  const auto below = [&](std::string_view concept_id) {
    std::vector<std::string> out;
    for (auto& id : h.descendants_at(concept_id, level)) {
      if (!cohort.count(id)) out.push_back(std::move(id));
    }
    return out;
  };
  TargetSets sets;
  sets.economic_nodes = below("D");
  sets.targets = {{"A", below("A"), 1}, {"B", below("B"), 1}, {"C", below("C"), -1}};
  return sets;
}

std::vector<double> importance(std::span<const double> cw, std::span<const double> mentions) {
  if (cw.size() != mentions.size()) fail(ErrorKind::shape, "credibility and mention vectors differ in length");
  const auto cw_pct = percent_of_total(cw, "credibility weights");
  const auto mention_pct = percent_of_total(mentions, "mention counts");
  std::vector<double> out(cw.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (cw_pct[i] + mention_pct[i]) / 2.0;
  return out;
}

std::vector<double> economic_effects(const std::vector<ScenarioComparison>& comparisons, const TargetSets& targets) {
  if (targets.economic_nodes.empty()) fail(ErrorKind::configuration, "no economic nodes to assess feasibility");
  std::vector<double> out;
  out.reserve(comparisons.size());
  for (const auto& c : comparisons) out.push_back(mean_delta(c, targets.economic_nodes, "economic"));
  return out;
}

std::vector<double> feasibility(std::span<const double> effects, int economic_sign) {
  auto out = signed_percent(effects);
  for (double& v : out) v *= economic_sign;
  return out;
}

std::vector<std::vector<double>> target_effects(const std::vector<ScenarioComparison>& comparisons,
                                                const TargetSets& targets) {
  if (targets.targets.empty()) fail(ErrorKind::configuration, "no target groups to assess influence");
  std::vector<std::vector<double>> out;
  out.reserve(comparisons.size());
  for (const auto& c : comparisons) {
    std::vector<double> row;
    for (const auto& group : targets.targets) {
      if (group.node_ids.empty()) fail(ErrorKind::configuration, "target group '" + group.name + "' is empty");
      row.push_back(group.desired_sign * mean_delta(c, group.node_ids, "target"));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> influence(const std::vector<std::vector<double>>& effects,
                              std::vector<std::vector<double>>* per_group) {
  const std::size_t n = effects.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const std::size_t groups = effects.front().size();
  std::vector<std::vector<double>> pct(n, std::vector<double>(groups, 0.0));
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<double> column(n);
    for (std::size_t c = 0; c < n; ++c) {
      if (effects[c].size() != groups) fail(ErrorKind::shape, "ragged target effect table");
      column[c] = effects[c][g];
    }
    const auto normalized = signed_percent(column);
    for (std::size_t c = 0; c < n; ++c) pct[c][g] = normalized[c];
  }
  for (std::size_t c = 0; c < n; ++c) {
    out[c] = groups ? std::accumulate(pct[c].begin(), pct[c].end(), 0.0) / static_cast<double>(groups) : 0.0;
  }
  if (per_group) *per_group = std::move(pct);
  return out;
}

AppropriatenessReport appropriateness(const std::vector<CandidateCriteria>& inputs, const CriterionWeights& weights) {
  weights.validate();
  AppropriatenessReport report;
  report.weights = weights;
  double positive = 0.0;
  for (const auto& in : inputs) {
    CandidateScore score;
    score.id = in.id;
    score.importance = in.importance;
    score.feasibility = in.feasibility;
    score.influence = in.influence;
    score.raw = weights.importance * in.importance + weights.feasibility * in.feasibility +
                weights.influence * in.influence;
    positive += std::max(score.raw, 0.0);
    report.candidates.push_back(std::move(score));
  }
  for (auto& s : report.candidates) s.appropriateness = positive > 0.0 ? s.raw / positive * 100.0 : 0.0;
  std::stable_sort(report.candidates.begin(), report.candidates.end(), [](const CandidateScore& a, const CandidateScore& b) {
    if (a.raw != b.raw) return a.raw > b.raw;
    if (a.influence != b.influence) return a.influence > b.influence;
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < report.candidates.size(); ++i) report.candidates[i].rank = static_cast<int>(i) + 1;
  return report;
}

AppropriatenessReport rank_candidates(const std::vector<std::string>& candidates, std::span<const double> cw,
                                      std::span<const double> mentions,
                                      const std::vector<ScenarioComparison>& comparisons, const TargetSets& targets,
                                      const CriterionWeights& weights) {
  if (candidates.size() != comparisons.size() || candidates.size() != cw.size() || candidates.size() != mentions.size()) {
    fail(ErrorKind::shape, "candidate, credibility, mention and comparison lists differ in length");
  }
  if (candidates.empty()) fail(ErrorKind::degenerate_input, "no candidates to rank");
  targets.validate(candidates);

  const auto imp = importance(cw, mentions);
  const auto cw_pct = percent_of_total(cw, "credibility weights");
  const auto mention_pct = percent_of_total(mentions, "mention counts");
  const auto feas = feasibility(economic_effects(comparisons, targets), targets.economic_sign);
  std::vector<std::vector<double>> per_group;
  const auto infl = influence(target_effects(comparisons, targets), &per_group);

  std::vector<CandidateCriteria> inputs;
  for (std::size_t i = 0; i < candidates.size(); ++i) inputs.push_back({candidates[i], imp[i], feas[i], infl[i]});
  auto report = appropriateness(inputs, weights);
  for (const auto& g : targets.targets) report.target_groups.push_back(g.name);
  for (auto& s : report.candidates) {
    const auto i = static_cast<std::size_t>(std::find(candidates.begin(), candidates.end(), s.id) - candidates.begin());
    s.cw_percent = cw_pct[i];
    s.mentions_percent = mention_pct[i];
    s.target_percent = per_group[i];
  }
  return report;
}

nlohmann::json AppropriatenessReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : candidates) {
    rows.push_back({{"id", s.id},
                    {"rank", s.rank},
                    {"importance", s.importance},
                    {"feasibility", s.feasibility},
                    {"influence", s.influence},
                    {"raw", s.raw},
                    {"appropriateness", s.appropriateness},
                    {"cw_percent", s.cw_percent},
                    {"mentions_percent", s.mentions_percent},
                    {"target_percent", s.target_percent}});
  }
  return {{"candidates", std::move(rows)},
          {"weights", {{"importance", weights.importance}, {"feasibility", weights.feasibility}, {"influence", weights.influence}}},
          {"target_groups", target_groups}};
}

std::string AppropriatenessReport::to_csv() const {
  std::string out = "rank,id,cw_percent,mentions_percent,importance,feasibility";
  for (const auto& g : target_groups) out += ",influence_" + g;
  out += ",influence,appropriateness\n";
  for (const auto& s : candidates) {
    out += std::to_string(s.rank) + "," + s.id + "," + format_double(s.cw_percent) + "," +
           format_double(s.mentions_percent) + "," + format_double(s.importance) + "," + format_double(s.feasibility);
    for (std::size_t g = 0; g < target_groups.size(); ++g) {
      out += "," + format_double(g < s.target_percent.size() ? s.target_percent[g] : 0.0);
    }
    out += "," + format_double(s.influence) + "," + format_double(s.appropriateness) + "\n";
  }
  return out;
}

}  // namespace fcm
