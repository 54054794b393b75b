#include "fcm/corpus_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/linguistic.hpp"
#include "fcm/util.hpp"

namespace fcm {

namespace {

namespace fs = std::filesystem;

constexpr std::array<std::size_t, 3> kReferenceEdges{2682, 771, 135};
constexpr std::array<double, 3> kReferenceDensity{2682.0 / (186.0 * 185.0), 771.0 / (42.0 * 41.0),
                                                  135.0 / (13.0 * 12.0)};
/// Group sizes of the reference corpus, in kStakeholderGroups order.
constexpr std::array<std::size_t, 5> kReferenceGroupSizes{6, 8, 7, 7, 7};

constexpr double kConsensusPositive = 0.7;
constexpr double kMinMagnitude = 0.2;
constexpr double kMaxMagnitude = 0.9;
constexpr double kNoise = 0.1;
/// Keeps every quantized weight away from zero in all four input formats.
constexpr double kFloorMagnitude = 0.1;

// std distributions are implementation-defined; the engine is not, so the
// conversions below keep the corpus identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool chance(double p) { return uniform() < p; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

using Pair = std::pair<std::size_t, std::size_t>;

// Node ids of one level and, per node, the index of its parent one level up.
struct Level3 {
  std::vector<std::string> ids;
  std::vector<std::size_t> parent;
};

std::vector<std::size_t> children_of(const Level3& lower, std::size_t group) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lower.ids.size(); ++i) {
    if (lower.parent[i] == group) out.push_back(i);
  }
  return out;
}

// Picks `budget` pairs of `lower` nodes that project onto `upper_support`
// (or stay inside one group), covering every upper pair and every node.
// Returns the pairs and, per upper pair, the index of its covering pair.
std::vector<Pair> choose_support(const Level3& lower, const std::set<Pair>& upper_support,
                                 const std::vector<Pair>& upper_order, std::size_t budget, Rng& rng,
                                 std::vector<std::size_t>& representative, const char* level_name) {
  const std::size_t n = lower.ids.size();
  const auto eligible = [&](std::size_t a, std::size_t b) {
    return a != b && (lower.parent[a] == lower.parent[b] || upper_support.count({lower.parent[a], lower.parent[b]}));
  };
  std::set<Pair> chosen;
  std::vector<Pair> ordered;
  const auto take = [&](Pair p) {
    if (chosen.insert(p).second) ordered.push_back(p);
  };

  representative.clear();
  for (const auto& [ga, gb] : upper_order) {
    const auto from = children_of(lower, ga);
    const auto to = children_of(lower, gb);
    const Pair p{from[rng.below(from.size())], to[rng.below(to.size())]};
    take(p);
    representative.push_back(static_cast<std::size_t>(std::find(ordered.begin(), ordered.end(), p) - ordered.begin()));
  }
  std::vector<bool> touched(n, false);
  for (const auto& [a, b] : ordered) touched[a] = touched[b] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (touched[v]) continue;
    std::vector<Pair> options;
    for (std::size_t u = 0; u < n; ++u) {
      if (eligible(v, u)) options.emplace_back(v, u);
      if (eligible(u, v)) options.emplace_back(u, v);
    }
    if (options.empty()) {
      fail(ErrorKind::configuration, "node '" + lower.ids[v] + "' cannot be connected at the " + level_name + " level");
    }
    const Pair p = options[rng.below(options.size())];
    take(p);
    touched[p.first] = touched[p.second] = true;
  }
  if (ordered.size() > budget) {
    fail(ErrorKind::configuration, std::string("edge budget at the ") + level_name + " level is below the " +
                                       std::to_string(ordered.size()) + " edges needed to cover the level above");
  }
  std::vector<Pair> pool;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (eligible(a, b) && !chosen.count({a, b})) pool.emplace_back(a, b);
    }
  }
  rng.shuffle(pool);
  if (ordered.size() + pool.size() < budget) {
    fail(ErrorKind::configuration, std::string("edge budget at the ") + level_name + " level exceeds the " +
                                       std::to_string(ordered.size() + pool.size()) + " admissible edges");
  }
  for (std::size_t k = 0; ordered.size() < budget; ++k) take(pool[k]);
  return ordered;
}

long round_half_away(double x) { return std::lround(x); }

// Cell text of a weight in [-1, 1] for one input format.
std::string cell_text(double value, SourceFormat format) {
  switch (format) {
    case SourceFormat::numeric_1:
      return format_double(static_cast<double>(round_half_away(value * 100.0)) / 100.0);
    case SourceFormat::numeric_10:
      return format_double(static_cast<double>(round_half_away(value * 100.0)) / 10.0);
    case SourceFormat::linguistic_13: {
      const auto& set = base_term_set();
      return set.label(static_cast<int>(round_half_away(value * set.half_width())));
    }
    case SourceFormat::linguistic_11: {
      const auto& set = eleven_term_set();
      return set.label(static_cast<int>(round_half_away(value * set.half_width())));
    }
    case SourceFormat::beta:
      return format_double(value * kMaxBeta);
  }
  return "0";
}

std::string stakeholder_id(std::size_t index, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(count).size());
  auto digits = std::to_string(index + 1);
  return "S" + std::string(width - digits.size(), '0') + digits;
}

std::vector<std::string> group_assignment(std::size_t n_maps) {
  std::vector<std::string> out;
  if (n_maps == 35) {
    for (std::size_t g = 0; g < 5; ++g) {
      for (std::size_t k = 0; k < kReferenceGroupSizes[g]; ++k) out.emplace_back(kStakeholderGroups[g]);
    }
    return out;
  }
  // Contiguous blocks of near-equal size.
  for (std::size_t g = 0; g < 5; ++g) {
    const std::size_t size = n_maps / 5 + (g < n_maps % 5 ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) out.emplace_back(kStakeholderGroups[g]);
  }
  return out;
}

}  // namespace

void CorpusSpec::validate() const {
  if (n_maps < 2) fail(ErrorKind::configuration, "a corpus needs at least two maps");
  if (!(level_sizes[0] >= level_sizes[1] && level_sizes[1] >= level_sizes[2] && level_sizes[2] >= 2)) {
    fail(ErrorKind::configuration, "level sizes must shrink upwards and keep at least two concepts");
  }
  if (level_sizes[1] > 26 * level_sizes[2] || level_sizes[0] > 99 * level_sizes[1]) {
    fail(ErrorKind::configuration, "level sizes exceed the id scheme");
  }
  for (double p : {share_probability, dissent_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::configuration, "probabilities must lie in [0, 1]");
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t n = level_sizes[k];
    if (edge_counts[k] > n * (n - 1)) fail(ErrorKind::configuration, "edge count exceeds N (N - 1)");
  }
}

std::array<std::size_t, 3> CorpusSpec::edge_budget() const {
  std::array<std::size_t, 3> out = edge_counts;
  for (std::size_t k = 0; k < 3; ++k) {
    if (out[k] != 0) continue;
    const double n = static_cast<double>(level_sizes[k]);
    out[k] = reference_sizes() ? kReferenceEdges[k]
                               : static_cast<std::size_t>(std::max(1.0, std::round(kReferenceDensity[k] * n * (n - 1))));
  }
  return out;
}

SyntheticCorpus make_synthetic_corpus(const CorpusSpec& spec) {
  spec.validate();
  const auto budget = spec.edge_budget();
  SyntheticCorpus corpus{spec.reference_sizes() ? CondensationHierarchy::water_scarcity()
                                                : CondensationHierarchy::synthetic(spec.level_sizes[0],
                                                                                   spec.level_sizes[1],
                                                                                   spec.level_sizes[2]),
                         {},
                         {},
                         {}};
  const auto& h = corpus.hierarchy;
  Rng rng(spec.seed);

  const auto level_of = [&](Level level, Level above) {
    Level3 out;
    out.ids = h.ids_at(level);
    const auto& upper = h.ids_at(above);
    for (const auto& id : out.ids) {
      const auto& parent = *h.parent_of(id);
      out.parent.push_back(static_cast<std::size_t>(std::find(upper.begin(), upper.end(), parent) - upper.begin()));
    }
    return out;
  };
  const auto kvs = level_of(Level::key_variables, Level::concepts);
  const auto vars = level_of(Level::variables, Level::key_variables);

  // Concept support first, then each lower level projects onto the one above.
  const std::size_t nc = h.ids_at(Level::concepts).size();
  std::vector<Pair> concept_pairs;
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = 0; b < nc; ++b) {
      if (a != b) concept_pairs.emplace_back(a, b);
    }
  }
  rng.shuffle(concept_pairs);
  concept_pairs.resize(std::min(budget[2], concept_pairs.size()));
  const std::set<Pair> concept_set(concept_pairs.begin(), concept_pairs.end());

  std::vector<std::size_t> kv_witness;
  const auto kv_pairs = choose_support(kvs, concept_set, concept_pairs, budget[1], rng, kv_witness, "key-variable");
  const std::set<Pair> kv_set(kv_pairs.begin(), kv_pairs.end());
  std::vector<std::size_t> var_witness;
  const auto var_pairs = choose_support(vars, kv_set, kv_pairs, budget[0], rng, var_witness, "variable");
  corpus.support_edges = {var_pairs.size(), kv_pairs.size(), concept_pairs.size()};

  // Consensus view of every edge, then which stakeholders mention it.
  const std::size_t edges = var_pairs.size();
  std::vector<double> sign(edges);
  std::vector<double> base(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    sign[e] = rng.chance(kConsensusPositive) ? 1.0 : -1.0;
    base[e] = rng.uniform(kMinMagnitude, kMaxMagnitude);
  }
  std::vector<std::vector<bool>> mentions(spec.n_maps, std::vector<bool>(edges, false));
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t owner = rng.below(spec.n_maps);
    for (std::size_t m = 0; m < spec.n_maps; ++m) mentions[m][e] = m == owner || rng.chance(spec.share_probability);
  }
  // The edges witnessing a key-variable pair (and through it a concept pair)
  // are carried by at least two stakeholders, so no upper-level pair hinges
  // on one map's condensed weight.
  for (std::size_t w : var_witness) {
    std::vector<std::size_t> others;
    std::size_t carried = 0;
    for (std::size_t m = 0; m < spec.n_maps; ++m) {
      if (mentions[m][w]) {
        ++carried;
      } else {
        others.push_back(m);
      }
    }
    if (carried < 2) mentions[others[rng.below(others.size())]][w] = true;
  }
  // Every stakeholder touches every key variable, so each map condenses to
  // the full key-variable level: one more support edge per missing group.
  std::vector<std::vector<std::size_t>> edges_at_kv(kvs.ids.size());
  for (std::size_t e = 0; e < edges; ++e) {
    const auto a = vars.parent[var_pairs[e].first];
    const auto b = vars.parent[var_pairs[e].second];
    edges_at_kv[a].push_back(e);
    if (b != a) edges_at_kv[b].push_back(e);
  }
  for (std::size_t m = 0; m < spec.n_maps; ++m) {
    std::vector<bool> covered(kvs.ids.size(), false);
    const auto cover = [&](std::size_t e) {
      covered[vars.parent[var_pairs[e].first]] = true;
      covered[vars.parent[var_pairs[e].second]] = true;
    };
    for (std::size_t e = 0; e < edges; ++e) {
      if (mentions[m][e]) cover(e);
    }
    for (std::size_t k = 0; k < kvs.ids.size(); ++k) {
      if (covered[k] || edges_at_kv[k].empty()) continue;
      const auto e = edges_at_kv[k][rng.below(edges_at_kv[k].size())];
      mentions[m][e] = true;
      cover(e);
    }
  }

  constexpr SourceFormat kFormats[] = {SourceFormat::numeric_1, SourceFormat::numeric_10, SourceFormat::linguistic_13,
                                       SourceFormat::linguistic_11};
  const auto groups = group_assignment(spec.n_maps);
  for (std::size_t m = 0; m < spec.n_maps; ++m) {
    const SourceFormat format = kFormats[rng.below(4)];
    const auto stakeholder = stakeholder_id(m, spec.n_maps);

    std::vector<std::size_t> local;
    std::vector<std::size_t> position(vars.ids.size(), SIZE_MAX);
    for (std::size_t e = 0; e < edges; ++e) {
      if (!mentions[m][e]) continue;
      for (std::size_t v : {var_pairs[e].first, var_pairs[e].second}) {
        if (position[v] == SIZE_MAX) {
          position[v] = 0;
          local.push_back(v);
        }
      }
    }
    std::sort(local.begin(), local.end());
    for (std::size_t k = 0; k < local.size(); ++k) position[local[k]] = k;

    const std::size_t n = local.size();
    std::vector<std::string> cells(n * n, "0");
    for (std::size_t e = 0; e < edges; ++e) {
      if (!mentions[m][e]) continue;
      const double magnitude = std::clamp(base[e] + kNoise * rng.normal(), kFloorMagnitude, 1.0);
      const double s = rng.chance(spec.dissent_probability) ? -sign[e] : sign[e];
      cells[position[var_pairs[e].first] * n + position[var_pairs[e].second]] = cell_text(s * magnitude, format);
    }

    std::vector<std::string> ids;
    for (std::size_t v : local) ids.push_back(vars.ids[v]);
    std::string csv = "id";
    for (const auto& id : ids) csv += "," + id;
    csv += "\n";
    for (std::size_t i = 0; i < n; ++i) {
      csv += ids[i];
      for (std::size_t j = 0; j < n; ++j) csv += "," + cells[i * n + j];
      csv += "\n";
    }

    Provenance provenance;
    provenance.stakeholder_id = stakeholder;
    provenance.group_id = groups[m];
    provenance.level = Level::variables;
    provenance.source_format = format;
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : h.describe(ids)) nodes.push_back(node_json(node));
    const nlohmann::json sidecar{
        {"format", to_string(format)}, {"nodes", std::move(nodes)}, {"provenance", provenance_json(provenance)}};

    const std::string path = "maps/" + stakeholder + ".csv";
    corpus.files[path] = std::move(csv);
    corpus.files[sidecar_path(path).generic_string()] = sidecar.dump(1) + "\n";
    corpus.manifest.entries.push_back({path, stakeholder, groups[m], Level::variables, format, std::nullopt});
  }
  corpus.manifest.hierarchy = "hierarchy.json";
  corpus.files["hierarchy.json"] = h.to_json().dump(1) + "\n";
  corpus.files["manifest.json"] = corpus.manifest.to_json().dump(1) + "\n";
  return corpus;
}

fs::path write_synthetic_corpus(const SyntheticCorpus& corpus, const fs::path& dir) {
  for (const auto& [relative, content] : corpus.files) write_text_file_atomic(dir / relative, content);
  return dir / "manifest.json";
}

fs::path generate_synthetic_corpus(const CorpusSpec& spec, const fs::path& dir) {
  return write_synthetic_corpus(make_synthetic_corpus(spec), dir);
}

}  // namespace fcm
