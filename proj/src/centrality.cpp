#include "fcm/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/linguistic.hpp"
#include "fcm/util.hpp"

namespace fcm {

namespace {

constexpr double kWeightSumTolerance = 1e-9;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

double edge_cost(double w, EdgeLength length) {
  const double magnitude = std::abs(w);
  return length == EdgeLength::inverse ? 1.0 / magnitude : magnitude;
}

bool same_length(double a, double b) {
  return std::abs(a - b) <= kPathTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

struct PathStatistics {
  std::vector<double> closeness;
  std::vector<double> betweenness;
};

// Brandes' accumulation with Dijkstra from every source. Near-equal lengths
// (within kPathTieTolerance) are treated as ties so that numerically
// equivalent paths share credit.
PathStatistics path_statistics(const FcmModel& m, EdgeLength length) {
  const std::size_t n = m.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && m.weight(i, j) != 0.0) out[i].emplace_back(j, edge_cost(m.weight(i, j), length));
    }
  }

  std::vector<double> inbound_distance(n, 0.0);
  std::vector<bool> reached(n, false);
  PathStatistics stats{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  std::vector<double> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<bool> settled(n);
  std::vector<std::size_t> order;
  order.reserve(n);

  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInfinity);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(settled.begin(), settled.end(), false);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[s] = 0.0;
    sigma[s] = 1.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (settled[v] || d > dist[v]) continue;
      settled[v] = true;
      order.push_back(v);
      for (const auto& [w, cost] : out[v]) {
        if (settled[w]) continue;
        const double candidate = dist[v] + cost;
        if (dist[w] == kInfinity || (candidate < dist[w] && !same_length(candidate, dist[w]))) {
          dist[w] = candidate;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          queue.emplace(candidate, w);
        } else if (same_length(candidate, dist[w])) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }

    for (std::size_t t = 0; t < n; ++t) {
      if (t != s && dist[t] != kInfinity) {
        inbound_distance[t] += dist[t];
        reached[t] = true;
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) stats.betweenness[w] += delta[w];
    }
  }

  for (std::size_t t = 0; t < n; ++t) {
    stats.closeness[t] = reached[t] && inbound_distance[t] > 0.0 ? 1.0 / inbound_distance[t] : 0.0;
  }
  return stats;
}

}  // namespace

void PrioritizationWeights::validate() const {
  for (double w : {degree, closeness, betweenness}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::configuration, "prioritization weights must be finite and nonnegative");
    }
  }
  if (std::abs(degree + closeness + betweenness - 1.0) > kWeightSumTolerance) {
    fail(ErrorKind::configuration, "prioritization weights must sum to 1");
  }
}

std::string_view to_string(EdgeLength length) {
  return length == EdgeLength::inverse ? "inverse" : "magnitude";
}

EdgeLength parse_edge_length(std::string_view text) {
  if (text == "inverse") return EdgeLength::inverse;
  if (text == "magnitude") return EdgeLength::magnitude;
  fail(ErrorKind::configuration, "unknown edge length convention '" + std::string(text) + "'");
}

double degree_centrality(const FcmModel& m, std::size_t node) {
  if (node >= m.size()) fail(ErrorKind::not_found, "node index out of range");
  double total = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) total += std::abs(m.weight(node, j)) + std::abs(m.weight(j, node));
  return total;
}

std::vector<double> degree_centralities(const FcmModel& m) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = degree_centrality(m, i);
  return out;
}

std::vector<double> closeness_centralities(const FcmModel& m, EdgeLength length) {
  return path_statistics(m, length).closeness;
}

std::vector<double> betweenness_centralities(const FcmModel& m, EdgeLength length) {
  return path_statistics(m, length).betweenness;
}

double closeness_centrality(const FcmModel& m, std::size_t node, EdgeLength length) {
  if (node >= m.size()) fail(ErrorKind::not_found, "node index out of range");
  return closeness_centralities(m, length)[node];
}

double betweenness_centrality(const FcmModel& m, std::size_t node, EdgeLength length) {
  if (node >= m.size()) fail(ErrorKind::not_found, "node index out of range");
  return betweenness_centralities(m, length)[node];
}

double consensus_centrality(double degree, double closeness, double betweenness,
                            const PrioritizationWeights& weights) {
  weights.validate();
  return weights.degree * degree + weights.closeness * closeness + weights.betweenness * betweenness;
}

std::vector<double> scale_to_range(std::span<const double> values, double scale) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (hi > lo) {
      out[i] = scale * (values[i] - lo) / (hi - lo);
    } else {
      out[i] = hi > 0.0 ? scale : 0.0;
    }
  }
  return out;
}

CentralityReport analyze_centrality(const FcmModel& m, const CentralityOptions& options) {
  options.weights.validate();
  const auto degree = degree_centralities(m);
  const auto paths = path_statistics(m, options.edge_length);
  const auto sd = scale_to_range(degree, options.scale);
  const auto sc = scale_to_range(paths.closeness, options.scale);
  const auto sb = scale_to_range(paths.betweenness, options.scale);

  CentralityReport report;
  report.options = options;
  report.node_count = m.size();
  report.edge_count = m.edge_count();
  report.density = density(m);
  std::vector<double> ccm(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    ccm[i] = consensus_centrality(sd[i], sc[i], sb[i], options.weights);
    report.nodes.push_back({m.node(i).id, degree[i], paths.closeness[i], paths.betweenness[i], sd[i], sc[i],
                            sb[i], ccm[i], 0.0});
  }
  if (std::any_of(ccm.begin(), ccm.end(), [](double c) { return c > 0.0; })) {
    const auto cw = credibility_from_ccm(ccm, options.scale);
    for (std::size_t i = 0; i < m.size(); ++i) report.nodes[i].credibility_weight = cw[i];
  }
  if (m.size() >= 4) report.map = map_centrality(m, options);
  return report;
}

MapCentrality map_centrality(const FcmModel& m, const CentralityOptions& options) {
  const std::size_t n = m.size();
  if (n < 4) fail(ErrorKind::degenerate_input, "map centrality needs at least 4 nodes");
  options.weights.validate();
  const auto degree = degree_centralities(m);
  const auto paths = path_statistics(m, options.edge_length);
  const auto sd = scale_to_range(degree, options.scale);
  const auto sc = scale_to_range(paths.closeness, options.scale);
  const auto sb = scale_to_range(paths.betweenness, options.scale);

  const auto spread = [](const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += top - x;
    return total;
  };
  const double nd = static_cast<double>(n);
  MapCentrality out;
  out.degree = spread(sd) / (nd - 1.0);
  out.closeness = spread(sc) / ((nd - 1.0) * (nd - 2.0) * (nd - 3.0));
  out.betweenness = spread(sb) / (nd - 1.0);
  out.consensus = options.weights.degree * out.degree + options.weights.closeness * out.closeness +
                  options.weights.betweenness * out.betweenness;
  return out;
}

std::vector<double> credibility_from_ccm(std::span<const double> ccm, double scale) {
  const int g = static_cast<int>(std::lround(scale));
  if (g < 1 || static_cast<double>(g) != scale) {
    fail(ErrorKind::configuration, "credibility scale must be a positive whole number of terms");
  }
  std::vector<double> crisp(ccm.size());
  for (std::size_t i = 0; i < ccm.size(); ++i) crisp[i] = defuzzify_unipolar(Beta{ccm[i]}, g);
  const double total = std::accumulate(crisp.begin(), crisp.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, "every consensus centrality is zero");
  for (double& c : crisp) c /= total;
  return crisp;
}

std::vector<double> node_credibility_weights(const FcmModel& m, const CentralityOptions& options) {
  const auto report = analyze_centrality(m, options);
  std::vector<double> ccm;
  ccm.reserve(report.nodes.size());
  for (const auto& node : report.nodes) ccm.push_back(node.ccm);
  return credibility_from_ccm(ccm, options.scale);
}

std::vector<double> fcm_credibility_weights(std::span<const FcmModel* const> maps,
                                            const CentralityOptions& options) {
  if (maps.empty()) fail(ErrorKind::degenerate_input, "credibility weighting needs at least one map");
  std::vector<double> consensus(maps.size());
  for (std::size_t k = 0; k < maps.size(); ++k) consensus[k] = map_centrality(*maps[k], options).consensus;
  const double total = std::accumulate(consensus.begin(), consensus.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, "every map has zero consensus centrality");
  for (double& c : consensus) c /= total;
  return consensus;
}

std::vector<double> fcm_credibility_weights(std::span<const FcmModel> maps, const CentralityOptions& options) {
  std::vector<const FcmModel*> pointers;
  pointers.reserve(maps.size());
  for (const auto& m : maps) pointers.push_back(&m);
  return fcm_credibility_weights(std::span<const FcmModel* const>(pointers), options);
}

nlohmann::json CentralityReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& n : nodes) {
    rows.push_back({{"id", n.id},
                    {"degree", n.degree},
                    {"closeness", n.closeness},
                    {"betweenness", n.betweenness},
                    {"scaled_degree", n.scaled_degree},
                    {"scaled_closeness", n.scaled_closeness},
                    {"scaled_betweenness", n.scaled_betweenness},
                    {"ccm", n.ccm},
                    {"cw", n.credibility_weight}});
  }
  nlohmann::json map_doc = nullptr;
  if (map) {
    map_doc = {{"degree", map->degree},
               {"closeness", map->closeness},
               {"betweenness", map->betweenness},
               {"ccm", map->consensus}};
  }
  return {{"nodes", std::move(rows)},
          {"map", std::move(map_doc)},
          {"node_count", node_count},
          {"edge_count", edge_count},
          {"density", density},
          {"options",
           {{"weights", {options.weights.degree, options.weights.closeness, options.weights.betweenness}},
            {"edge_length", to_string(options.edge_length)},
            {"scale", options.scale}}}};
}

std::string CentralityReport::to_csv() const {
  std::string out = "id,degree,closeness,betweenness,ccm,cw\n";
  for (const auto& n : nodes) {
    out += n.id + "," + format_double(n.degree) + "," + format_double(n.closeness) + "," +
           format_double(n.betweenness) + "," + format_double(n.ccm) + "," + format_double(n.credibility_weight) +
           "\n";
  }
  return out;
}

}  // namespace fcm
