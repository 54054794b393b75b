// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here and nowhere else.
//
//   acceptance [--only <id>]... [--list] [--fcm <path>] [--data <dir>] [--work <dir>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcm/aggregation.hpp"
#include "fcm/appropriateness.hpp"
#include "fcm/centrality.hpp"
#include "fcm/condensation.hpp"
#include "fcm/corpus_gen.hpp"
#include "fcm/errors.hpp"
#include "fcm/linguistic.hpp"
#include "fcm/model_io.hpp"
#include "fcm/pipeline.hpp"
#include "fcm/simulation.hpp"
#include "fcm/util.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using fcm::testing::Edge;
using fcm::testing::make_map;

// ------------------------------------------------------------------ tolerances

constexpr double kConversionTolerance = 0.02;    // beta units, per published cell
constexpr double kConversionSeconds = 1.0;
constexpr double kWalkthroughTolerance = 1e-12;  // exact up to binary representation of 0.187
constexpr int kPropertyCases = 1000;
constexpr double kPropertyTolerance = 1e-12;
constexpr int kCentralityGraphs = 200;
constexpr std::size_t kCentralityMaxNodes = 8;
constexpr double kOracleTolerance = 1e-9;
constexpr double kCcmTolerance = 0.02;
constexpr int kCondensationInstances = 100;
constexpr int kAggregationInstances = 200;
constexpr int kSimulationMatrices = 100;
constexpr int kZeroMatrixIterations = 2;
constexpr int kFixtureIterations = 100;
constexpr int kConceptIterations = 50;
constexpr double kEndToEndSeconds = 60.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  int failures = 0;

  /// Records a failed check; only the first few are described.
  void fail(const std::string& what) {
    pass = false;
    if (failures++ < 3) detail << (detail.tellp() > 0 ? "; " : "") << what;
  }
  void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

struct Context {
  fs::path data;
  fs::path work;
  fs::path fcm;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// The reference-size synthetic corpus (seed 1), built once.
const fcm::Corpus& reference_corpus() {
  static const fcm::Corpus corpus = [] {
    const auto s = fcm::make_synthetic_corpus({});
    std::vector<fcm::FcmModel> maps;
    for (const auto& e : s.manifest.entries) {
      const auto sidecar = nlohmann::json::parse(s.files.at(fcm::sidecar_path(e.path).generic_string()));
      maps.push_back(fcm::parse_fcm_csv(s.files.at(e.path.generic_string()), e.source_format, &sidecar));
    }
    return fcm::Corpus::build(std::move(maps), s.hierarchy);
  }();
  return corpus;
}

// ------------------------------------------------------------------ criteria

void two_tuple_conversion(const Context& ctx, Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto converted = fcm::load_fcm(ctx.data / "fixture13.csv");
  const double elapsed = seconds_since(start);
  const auto published = fcm::load_fcm(ctx.data / "fixture13_beta_published.csv");
  if (converted.ids() != published.ids()) {
    o.fail("fixture node ids differ");
    return;
  }
  int cells = 0;
  int off = 0;
  double worst = 0.0;
  std::string worst_cell;
  for (std::size_t i = 0; i < converted.size(); ++i) {
    for (std::size_t j = 0; j < converted.size(); ++j) {
      const double expected = published.weight(i, j);
      if (expected == 0.0 && converted.weight(i, j) == 0.0) continue;
      ++cells;
      const double err = std::abs(converted.weight(i, j) - expected);
      if (err > kConversionTolerance) ++off;
      if (err > worst) {
        worst = err;
        worst_cell = converted.node(i).id + "->" + converted.node(j).id + " got " + fmt(converted.weight(i, j), 3) +
                     " published " + fmt(expected, 2);
      }
    }
  }
  if (off > 0) {
    o.fail(std::to_string(off) + "/" + std::to_string(cells) + " nonzero cells outside +/-" +
           fmt(kConversionTolerance, 2) + " (worst " + worst_cell + ")");
  } else {
    o.note(std::to_string(cells) + " nonzero cells within +/-" + fmt(kConversionTolerance, 2));
  }
  if (elapsed >= kConversionSeconds) o.fail("conversion took " + fmt(elapsed, 3) + " s");
  o.note("conversion " + fmt(elapsed * 1000.0, 2) + " ms");
}

void two_tuple_walkthrough(const Context&, Outcome& o) {
  const auto t = fcm::tuple_from_beta(fcm::Beta{-1.813});
  if (t.term != -2 || std::abs(t.alpha - 0.187) > kWalkthroughTolerance) {
    o.fail("-1.813 -> (s_" + std::to_string(t.term) + ", " + fmt(t.alpha, 15) + ")");
  }
  if (std::abs(fcm::beta_from_tuple({-2, 0.187}).value + 1.813) > kWalkthroughTolerance) {
    o.fail("(s_-2, 0.187) does not invert to -1.813");
  }
  const int vh = fcm::base_term_set().index_of("VH");
  const auto from_label = fcm::tuple_from_term(vh);
  if (vh != 5 || from_label.term != 5 || from_label.alpha != 0.0) o.fail("VH is not (s_5, 0)");
  if (fcm::beta_from_tuple(from_label).value != 5.0) o.fail("(s_5, 0) is not beta 5");
  if (fcm::tuple_from_beta(fcm::Beta{5.0}) != fcm::Fuzzy2Tuple{5, 0.0}) o.fail("beta 5 is not (s_5, 0)");
  if (o.pass) o.note("-1.813 -> (s_-2, 0.187); VH -> (s_5, 0) -> 5");
}

void two_tuple_properties(const Context&, Outcome& o) {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> beta_dist(-6.0, 6.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> alpha_dist(-0.5, 0.5);
  const auto& s = fcm::base_term_set();
  const auto& eleven = fcm::eleven_term_set();
  int identity = 0, partition = 0, monotone = 0, odd = 0;

  for (int k = 0; k < kPropertyCases; ++k) {
    // Delta then its inverse, and the inverse then Delta.
    const double beta = beta_dist(rng);
    const auto t = fcm::tuple_from_beta(fcm::Beta{beta});
    const bool valid = t.term == static_cast<int>(std::lround(beta)) && t.alpha >= -0.5 && t.alpha <= 0.5;
    if (!valid || std::abs(fcm::beta_from_tuple(t).value - beta) > kPropertyTolerance) ++identity;
    int term = static_cast<int>(rng() % 13) - 6;
    double alpha = alpha_dist(rng);
    if (alpha == -0.5 || (term == -6 && alpha < 0) || (term == 6 && alpha > 0)) alpha = 0.0;
    const auto back = fcm::tuple_from_beta(fcm::beta_from_tuple({term, alpha}));
    if (back.term != term || std::abs(back.alpha - alpha) > kPropertyTolerance) ++identity;

    // Memberships of both bundled term sets sum to one on the domain.
    const double x = unit(rng);
    for (const auto* set : {&s, &eleven}) {
      double total = 0.0;
      for (int i = -set->half_width(); i <= set->half_width(); ++i) total += set->membership(i, x);
      if (std::abs(total - 1.0) > kPropertyTolerance) ++partition;
    }

    // Numeric -> beta and beta -> crisp are nondecreasing.
    const double a = unit(rng);
    const double b = unit(rng);
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (fcm::beta_from_numeric(lo, s).value > fcm::beta_from_numeric(hi, s).value) ++monotone;
    if (fcm::defuzzify(fcm::Beta{6 * lo}) > fcm::defuzzify(fcm::Beta{6 * hi})) ++monotone;

    // Negation commutes with conversion and with Delta.
    if (fcm::beta_from_numeric(-a, s).value != -fcm::beta_from_numeric(a, s).value) ++odd;
    const auto neg = fcm::tuple_from_beta(fcm::Beta{-beta});
    if (neg.term != -t.term || std::abs(neg.alpha + t.alpha) > kPropertyTolerance) ++odd;
    for (int i = -6; i <= 6; ++i) {
      if (std::abs(s.membership(-i, -x) - s.membership(i, x)) > kPropertyTolerance) {
        ++odd;
        break;
      }
    }
  }
  const auto report = [&](const char* name, int failures) {
    if (failures > 0) o.fail(std::string(name) + ": " + std::to_string(failures) + " failures");
  };
  report("identity", identity);
  report("partition of unity", partition);
  report("monotonicity", monotone);
  report("oddness", odd);
  if (o.pass) o.note(std::to_string(kPropertyCases) + " cases per property, 0 failures");
}

void density(const Context&, Outcome& o) {
  // Hand-built fixtures: exact edge counts placed row by row.
  const auto fixture = [](std::size_t n, std::size_t edges) {
    std::vector<Edge> list;
    for (std::size_t i = 0; i < n && list.size() < edges; ++i) {
      for (std::size_t j = 0; j < n && list.size() < edges; ++j) {
        if (i != j) list.emplace_back(static_cast<int>(i), static_cast<int>(j), (i + j) % 2 ? 1.5 : -2.0);
      }
    }
    return make_map(n, list);
  };
  struct Case {
    const char* name;
    std::size_t n, edges;
    double rounded;
  };
  const auto& corpus = reference_corpus();
  const std::map<std::string, const fcm::FcmModel*> social{
      {"186", &corpus.social(fcm::Level::variables)}, {"13", &corpus.social(fcm::Level::concepts)}};
  for (const Case& c : {Case{"186", 186, 2682, 0.078}, Case{"13", 13, 135, 0.865}}) {
    const double exact = static_cast<double>(c.edges) / static_cast<double>(c.n * (c.n - 1));
    const auto m = fixture(c.n, c.edges);
    const auto check = [&](const fcm::FcmModel& model, const std::string& where) {
      const double d = fcm::density(model);
      if (model.size() != c.n || model.edge_count() != c.edges || d != exact) {
        o.fail(where + ": " + std::to_string(model.edge_count()) + "/(" + std::to_string(model.size()) + "*" +
               std::to_string(model.size() - 1) + ") = " + fmt(d, 6));
      } else if (std::round(d * 1000.0) / 1000.0 != c.rounded) {
        o.fail(where + ": density " + fmt(d, 6) + " does not round to " + fmt(c.rounded, 3));
      }
    };
    check(m, std::string("fixture N=") + c.name);
    check(*social.at(c.name), std::string("synthetic social N=") + c.name);
  }
  if (o.pass) o.note("2682/(186*185) = 0.078 and 135/(13*12) = 0.865 on fixtures and the synthetic corpus");
}

fcm::FcmModel random_digraph(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool discrete = rng() % 3 == 0;  // integer weights force tied shortest paths
  const double p = 0.2 + 0.5 * unit(rng);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || unit(rng) > p) continue;
      double w = discrete ? 2.0 * static_cast<double>(1 + rng() % 3) : 0.05 + 5.95 * unit(rng);
      if (unit(rng) < 0.4) w = -w;
      edges.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
    }
  }
  return make_map(n, edges);
}

void centrality(const Context&, Outcome& o) {
  std::mt19937_64 rng(8086);
  double worst = 0.0;
  for (int trial = 0; trial < kCentralityGraphs; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % (kCentralityMaxNodes - 1);
    const auto m = random_digraph(rng, n);
    const auto degree = fcm::degree_centralities(m);
    for (std::size_t v = 0; v < n; ++v) {
      double expected = 0.0;
      for (std::size_t u = 0; u < n; ++u) expected += std::abs(m.weight(v, u)) + std::abs(m.weight(u, v));
      worst = std::max(worst, std::abs(degree[v] - expected));
      if (std::abs(degree[v] - expected) > kOracleTolerance) o.fail("degree, graph " + std::to_string(trial));
    }
    for (auto length : {fcm::EdgeLength::inverse, fcm::EdgeLength::magnitude}) {
      const auto oracle = fcm::testing::enumerate_paths(m, length);
      const auto closeness = fcm::closeness_centralities(m, length);
      const auto betweenness = fcm::betweenness_centralities(m, length);
      for (std::size_t v = 0; v < n; ++v) {
        const double dc = std::abs(closeness[v] - oracle.closeness[v]);
        const double db = std::abs(betweenness[v] - oracle.betweenness[v]);
        worst = std::max({worst, dc, db});
        if (dc > kOracleTolerance) o.fail("closeness, graph " + std::to_string(trial));
        if (db > kOracleTolerance) o.fail("betweenness, graph " + std::to_string(trial));
      }
    }
  }

  // Published per-node degree, closeness and betweenness columns of the
  // 13-node fixture and the CCM column printed beside them.
  const double d[] = {5.66, 2.52, 3.06, 3.95, 1.56, 2.99, 6, 2.14, 3.93, 0, 3.58, 1.68, 3.71};
  const double c[] = {4.12, 5.45, 0.71, 3.11, 0.75, 0, 1.74, 3.6, 3.17, 2.28, 3.78, 2.37, 6};
  const double b[] = {1.27, 2.81, 0.38, 2.56, 0.5, 0, 0.5, 1.13, 0, 1.27, 3.56, 0.25, 6};
  const double ccm[] = {3.69, 3.59, 1.38, 3.21, 0.94, 1, 2.75, 2.29, 2.37, 1.18, 3.64, 1.43, 5.24};
  const fcm::PrioritizationWeights equal{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double worst_ccm = 0.0;
  for (std::size_t i = 0; i < 13; ++i) {
    const double got = fcm::consensus_centrality(d[i], c[i], b[i], equal);
    worst_ccm = std::max(worst_ccm, std::abs(got - ccm[i]));
    if (std::abs(got - ccm[i]) > kCcmTolerance) {
      o.fail("CCM c_" + std::to_string(i + 1) + ": " + fmt(got, 3) + " vs " + fmt(ccm[i], 2));
    }
  }
  o.note(std::to_string(kCentralityGraphs) + " graphs, worst oracle gap " + fmt(worst, 12) +
         "; worst CCM gap " + fmt(worst_ccm, 4));
}

void condensation(const Context&, Outcome& o) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < kCondensationInstances; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const std::size_t groups = 2 + rng() % std::min<std::size_t>(4, n - 1);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = i < groups ? i : rng() % groups;
    std::shuffle(group.begin(), group.end(), rng);
    std::vector<std::vector<std::string>> members(groups);
    std::vector<std::set<std::size_t>> index_sets(groups);
    for (std::size_t i = 0; i < n; ++i) {
      members[group[i]].push_back(ids[i]);
      index_sets[group[i]].insert(i);
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && unit(rng) < 0.35) {
          edges.emplace_back(static_cast<int>(i), static_cast<int>(j), unit(rng) * 12.0 - 6.0);
        }
      }
    }
    const auto m = make_map(n, edges, fcm::Level::variables, ids);
    std::vector<double> cw(n);
    for (auto& x : cw) x = unit(rng) < 0.15 ? 0.0 : unit(rng);
    const auto condensed = fcm::condense(m, fcm::testing::grouped(members), cw);
    for (std::size_t gi = 0; gi < groups; ++gi) {
      for (std::size_t gj = 0; gj < groups; ++gj) {
        const double expected = gi == gj ? 0.0 : fcm::testing::brute_force_pair(m, index_sets[gi], index_sets[gj], cw);
        const double gap = std::abs(condensed.weight(gi, gj) - expected);
        worst = std::max(worst, gap);
        if (gap > kOracleTolerance) o.fail("instance " + std::to_string(trial) + " cell " + std::to_string(gi) + "," +
                                          std::to_string(gj));
      }
    }
  }

  // Identity grouping: one variable per key variable.
  {
    const std::size_t n = 9;
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> singletons;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("v" + std::to_string(i));
      singletons.push_back({ids.back()});
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && unit(rng) < 0.5) edges.emplace_back(static_cast<int>(i), static_cast<int>(j), unit(rng) * 12 - 6);
      }
    }
    const auto m = make_map(n, edges, fcm::Level::variables, ids);
    const auto c = fcm::condense(m, fcm::testing::grouped(singletons));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (c.weight(i, j) != m.weight(i, j)) o.fail("identity grouping changed a weight");
      }
    }
  }

  const auto& corpus = reference_corpus();
  const auto& variables = corpus.social(fcm::Level::variables);
  const auto key_variables = fcm::condense(variables, corpus.hierarchy());
  const auto concepts = fcm::condense(key_variables, corpus.hierarchy());
  const std::size_t counts[] = {variables.size(), key_variables.size(), concepts.size(),
                                corpus.social(fcm::Level::key_variables).size(),
                                corpus.social(fcm::Level::concepts).size()};
  if (counts[0] != 186 || counts[1] != 42 || counts[2] != 13 || counts[3] != 42 || counts[4] != 13) {
    o.fail("node counts " + std::to_string(counts[0]) + "->" + std::to_string(counts[1]) + "->" +
           std::to_string(counts[2]));
  }
  o.note(std::to_string(kCondensationInstances) + " instances, worst gap " + fmt(worst, 12) +
         "; identity grouping exact; 186->42->13");
}

fcm::FcmModel stakeholder_map(std::mt19937_64& rng, const std::string& sid, const std::vector<std::string>& pool) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> ids;
  for (const auto& id : pool) {
    if (unit(rng) < 0.7) ids.push_back(id);
  }
  if (ids.size() < 2) ids = {pool[0], pool[1]};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i != j && unit(rng) < 0.4) edges.emplace_back(static_cast<int>(i), static_cast<int>(j), unit(rng) * 12 - 6);
    }
  }
  auto m = make_map(ids.size(), edges, fcm::Level::variables, ids);
  auto p = m.provenance();
  p.stakeholder_id = sid;
  return m.with_provenance(p);
}

void aggregation(const Context&, Outcome& o) {
  std::mt19937_64 rng(1999);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g", "h", "i"};
  for (int trial = 0; trial < kAggregationInstances; ++trial) {
    std::vector<fcm::FcmModel> maps;
    std::vector<double> cw;
    const int k = 1 + static_cast<int>(rng() % 7);
    for (int s = 0; s < k; ++s) {
      maps.push_back(stakeholder_map(rng, "S" + std::to_string(s), pool));
      cw.push_back(unit(rng) + 1e-3);
    }
    const auto soc = fcm::aggregate(std::span<const fcm::FcmModel>(maps), cw).model;
    for (std::size_t i = 0; i < soc.size(); ++i) {
      for (std::size_t j = 0; j < soc.size(); ++j) {
        double bound = 0.0;
        for (const auto& m : maps) {
          const auto a = m.find(soc.node(i).id);
          const auto b = m.find(soc.node(j).id);
          if (a && b) bound = std::max(bound, std::abs(m.weight(*a, *b)));
        }
        if (std::abs(soc.weight(i, j)) > bound) o.fail("convexity bound, instance " + std::to_string(trial));
      }
    }

    // A single map, and several copies of one map under arbitrary weights,
    // aggregate to that map.
    const std::vector<fcm::FcmModel> single{maps.front()};
    const auto one = fcm::aggregate(std::span<const fcm::FcmModel>(single), std::vector<double>{cw.front()}).model;
    if (one.ids() != maps.front().ids() || one.weights() != maps.front().weights()) {
      o.fail("single-map identity, instance " + std::to_string(trial));
    }
    std::vector<fcm::FcmModel> copies;
    for (int s = 0; s < k + 1; ++s) {
      auto p = maps.front().provenance();
      p.stakeholder_id = "T" + std::to_string(s);
      copies.push_back(maps.front().with_provenance(p));
    }
    std::vector<double> copy_cw(copies.size());
    for (auto& x : copy_cw) x = unit(rng) + 1e-3;
    const auto same = fcm::aggregate(std::span<const fcm::FcmModel>(copies), copy_cw).model;
    if (same.ids() != maps.front().ids() || same.weights() != maps.front().weights()) {
      o.fail("identical-map identity, instance " + std::to_string(trial));
    }
  }
  if (o.pass) o.note(std::to_string(kAggregationInstances) + " instances; bound, single and identical identities exact");
}

void simulation(const Context& ctx, Outcome& o) {
  // Zero matrix: every node settles at 0.5.
  for (double start : {0.0, 0.5, 1.0}) {
    fcm::ScenarioSpec spec;
    spec.default_state = start;
    const auto r = fcm::run(make_map(6, {}), spec);
    bool half = r.converged;
    for (double v : r.steady_state) half = half && v == 0.5;
    if (!half || r.iterations > kZeroMatrixIterations) {
      o.fail("zero matrix from " + fmt(start, 1) + ": " + std::to_string(r.iterations) + " iterations");
    }
  }

  // Determinism: repeated runs agree bit for bit.
  const auto fixture = fcm::load_fcm(ctx.data / "fixture13.csv");
  fcm::ScenarioSpec clamped;
  clamped.clamps = {{"c_7", 1.0}};
  for (const auto* spec : {&clamped}) {
    const auto a = fcm::run(fixture, *spec);
    const auto b = fcm::run(fixture, *spec);
    if (a.trajectory != b.trajectory || a.steady_state != b.steady_state) o.fail("repeat runs differ");
  }

  // Contraction regime: lambda * max inflow < 4 makes the update a contraction.
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int diverged = 0;
  for (int trial = 0; trial < kSimulationMatrices; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && unit(rng) < 0.5) edges.emplace_back(static_cast<int>(i), static_cast<int>(j), unit(rng) * 12 - 6);
      }
    }
    const auto m = make_map(n, edges);
    double inflow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += std::abs(m.weight(j, i)) / 6.0;
      inflow = std::max(inflow, s);
    }
    fcm::ScenarioSpec spec;
    spec.lambda = inflow > 0.0 ? (0.01 + 3.98 * unit(rng)) / inflow : 1.0;
    spec.default_state = unit(rng);
    if (!fcm::run(m, spec).converged) ++diverged;
  }
  if (diverged > 0) o.fail(std::to_string(diverged) + " contraction-regime runs did not converge");

  const auto baseline = fcm::run(fixture, {});
  if (!baseline.converged || baseline.iterations > kFixtureIterations) {
    o.fail("fixture: " + std::to_string(baseline.iterations) + " iterations");
  }

  // Concept-level social map: preset baseline and one clamp per concept.
  const auto& corpus = reference_corpus();
  const auto& concepts = corpus.social(fcm::Level::concepts);
  fcm::ScenarioSpec preset;
  preset.preset = "jordan-2013";
  int worst = 0;
  std::vector<fcm::ScenarioSpec> specs{preset};
  for (const auto& id : concepts.ids()) {
    auto s = preset;
    s.clamps[id] = 1.0;
    specs.push_back(s);
  }
  for (const auto& s : specs) {
    const auto r = fcm::run(concepts, s, &corpus.hierarchy());
    worst = std::max(worst, r.iterations);
    if (!r.converged || r.iterations > kConceptIterations) {
      o.fail("concept run " + s.canonical() + ": " + std::to_string(r.iterations) + " iterations");
    }
  }
  o.note("zero matrix <= " + std::to_string(kZeroMatrixIterations) + " iterations; fixture " +
         std::to_string(baseline.iterations) + " iterations; concept runs <= " + std::to_string(worst) + " iterations");
}

void appropriateness(const Context&, Outcome& o) {
  const auto order = [](const fcm::AppropriatenessReport& r) {
    std::vector<std::string> ids;
    for (const auto& c : r.candidates) ids.push_back(c.id);
    return ids;
  };
  const auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += (s.empty() ? "" : " > ") + id;
    return s;
  };
  // Published criterion columns (importance, feasibility, influence).
  const std::vector<fcm::CandidateCriteria> key_variables{
      {"FA", 32, 17, 28}, {"FB", 40, -60, 43}, {"FD", 14, -1, 15}, {"FC", 14, -22, 14}};
  const std::vector<fcm::CandidateCriteria> harvesting{
      {"FA3", 28, -2, 35}, {"FA1", 40.5, -55, 32}, {"FA2", 24.5, -42, 28}, {"FA4", 7, -1, 5}};
  const std::vector<fcm::CandidateCriteria> strategic{{"FB2", 47.5, -49, 54}, {"FB1", 52.5, -51, 46}};
  const std::vector<std::pair<const std::vector<fcm::CandidateCriteria>*, std::vector<std::string>>> cohorts{
      {&key_variables, {"FA", "FB", "FD", "FC"}},
      {&harvesting, {"FA3", "FA1", "FA2", "FA4"}},
      {&strategic, {"FB2", "FB1"}}};
  std::string seen;
  for (const auto& [cohort, expected] : cohorts) {
    const auto got = order(fcm::appropriateness(*cohort));
    if (got != expected) o.fail("ranking " + join(got) + ", expected " + join(expected));
    seen += (seen.empty() ? "" : "; ") + join(got);
  }

  // Importance = mean of the printed credibility and mention percentages.
  const std::vector<double> cw{28, 42.5, 13.5, 16};
  const std::vector<double> mentions{36, 37.5, 14.5, 12};
  const std::vector<double> printed{32, 40, 14, 14};
  const auto imp = fcm::importance(cw, mentions);
  for (std::size_t i = 0; i < printed.size(); ++i) {
    if (imp[i] != printed[i]) o.fail("importance " + fmt(imp[i], 6) + " vs " + fmt(printed[i], 0));
  }
  if (o.pass) o.note(seen + "; importance 32/40/14/14 exact");
}

int run_cli(const Context& ctx, const std::vector<std::string>& args, const fs::path& log) {
  std::string command = "\"" + ctx.fcm.string() + "\"";
  for (const auto& a : args) command += " \"" + a + "\"";
  command += " >>\"" + log.string() + "\" 2>&1";
  return std::system(command.c_str());
}

std::map<std::string, std::string> snapshot(const fs::path& dir, const fs::path& skip) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path() != skip) {
      files[fs::relative(e.path(), dir).generic_string()] = fcm::read_text_file(e.path());
    }
  }
  return files;
}

void end_to_end(const Context& ctx, Outcome& o) {
  if (!fs::exists(ctx.fcm)) {
    o.fail("fcm executable not found at " + ctx.fcm.string());
    return;
  }
  const auto pipeline = [&](const fs::path& dir) -> double {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto log = dir / "log.txt";
    const auto at = [&](const char* rel) { return (dir / rel).string(); };
    std::vector<std::vector<std::string>> steps{
        {"gen-corpus", "--seed", "7", "--out", at("corpus")},
        {"convert", at("corpus/manifest.json"), "--out", at("converted")},
        {"condense", at("converted/manifest.json"), "--out", at("key_variables")},
        {"condense", at("key_variables/manifest.json"), "--out", at("concepts")},
        {"aggregate", at("concepts/manifest.json"), "--all", "--out", at("social")},
        {"simulate", at("social/social.csv"), "--preset", "jordan-2013", "-o", at("baseline.csv")}};
    for (const auto& [node, value] : std::vector<std::pair<std::string, std::string>>{
             {"F", "1"}, {"G", "1"}, {"H", "0"}, {"I", "1"}, {"K", "1"}}) {
      steps.push_back({"simulate", at("social/social.csv"), "--preset", "jordan-2013", "--clamp", node + "=" + value,
                       "-o", (dir / ("clamp_" + node + ".csv")).string()});
    }
    steps.push_back({"rank", at("converted/manifest.json"), "--concept", "F", "--json", "-o", at("rank.json")});
    const auto start = std::chrono::steady_clock::now();
    for (const auto& step : steps) {
      if (run_cli(ctx, step, log) != 0) {
        o.fail("'" + step.front() + "' failed (see " + log.string() + ")");
        return -1.0;
      }
    }
    return seconds_since(start);
  };
  const auto first_dir = ctx.work / "run1";
  const auto second_dir = ctx.work / "run2";
  const double first = pipeline(first_dir);
  if (first < 0) return;
  const double second = pipeline(second_dir);
  if (second < 0) return;
  for (double t : {first, second}) {
    if (t >= kEndToEndSeconds) o.fail("pipeline took " + fmt(t, 1) + " s");
  }
  // Compare everything except the logs, with run-specific paths normalized.
  auto a = snapshot(first_dir, first_dir / "log.txt");
  auto b = snapshot(second_dir, second_dir / "log.txt");
  const auto normalize = [](std::map<std::string, std::string>& files, const std::string& root) {
    for (auto& [name, text] : files) {
      for (auto pos = text.find(root); pos != std::string::npos; pos = text.find(root, pos)) text.replace(pos, root.size(), "<run>");
    }
  };
  normalize(a, first_dir.generic_string());
  normalize(b, second_dir.generic_string());
  if (a.size() != b.size()) o.fail("runs wrote " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " files");
  std::size_t differing = 0;
  for (const auto& [name, text] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != text) {
      if (differing++ == 0) o.fail("first differing file: " + name);
    }
  }
  if (differing > 0) o.fail(std::to_string(differing) + " files differ");
  o.note(std::to_string(a.size()) + " files byte-identical across runs; " + fmt(first, 2) + " s and " + fmt(second, 2) +
         " s");
}

struct Criterion {
  const char* id;
  const char* summary;
  std::function<void(const Context&, Outcome&)> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"two-tuple-conversion", "published beta matrix from the numeric fixture, +/-0.02, < 1 s", two_tuple_conversion},
      {"two-tuple-walkthrough", "-1.813 -> (s_-2, 0.187); VH -> (s_5, 0) -> 5", two_tuple_walkthrough},
      {"two-tuple-properties", "identity, partition of unity, monotonicity, oddness", two_tuple_properties},
      {"density", "2682/(186*185) and 135/(13*12)", density},
      {"centrality-oracles", "path enumeration oracle and published CCM column", centrality},
      {"condensation", "group-pair oracle, identity grouping, 186->42->13", condensation},
      {"aggregation", "convexity bound and identities", aggregation},
      {"simulation", "zero matrix, determinism, contraction, fixture and concept convergence", simulation},
      {"appropriateness", "published rankings and importance column", appropriateness},
      {"end-to-end", "gen-corpus .. rank under 60 s, byte-reproducible", end_to_end},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; prints one PASS/FAIL line per criterion."};
  std::vector<std::string> only;
  bool list = false;
  Context ctx;
  std::string data = FCM_DATA_DIR;
  std::string fcm_path = FCM_CLI_PATH;
  std::string work = fcm::testing::scratch_path("fcm_acceptance").string();
  app.add_option("--only", only, "Run only these criteria");
  app.add_flag("--list", list, "List criterion ids");
  app.add_option("--data", data, "Directory holding the bundled fixtures");
  app.add_option("--fcm", fcm_path, "Path of the fcm executable for the end-to-end run");
  app.add_option("--work", work, "Scratch directory for the end-to-end run");
  CLI11_PARSE(app, argc, argv);
  ctx.data = data;
  ctx.fcm = fcm_path;
  ctx.work = work;

  if (list) {
    for (const auto& c : criteria()) std::cout << c.id << "  " << c.summary << "\n";
    return 0;
  }
  for (const auto& id : only) {
    if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return id == c.id; })) {
      std::cerr << "unknown criterion: " << id << "\n";
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.check(ctx, outcome);
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.id << " (" << fmt(seconds_since(start), 2) << " s): "
              << outcome.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
