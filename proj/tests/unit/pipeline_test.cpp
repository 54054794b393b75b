#include "fcm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fcm/corpus_gen.hpp"
#include "fcm/errors.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

// The reference corpus is written and loaded once for the whole suite.
const fs::path& reference_manifest() {
  static const fs::path manifest = [] {
    const auto dir = fcm::testing::scratch_path("fcm_pipeline_reference");
    fs::remove_all(dir);
    return fcm::generate_synthetic_corpus({}, dir);
  }();
  return manifest;
}

const fcm::Corpus& reference_corpus() {
  static const fcm::Corpus corpus = fcm::Corpus::load(reference_manifest());
  return corpus;
}

TEST(ReferenceCorpus, SocialMapShapes) {
  const auto& c = reference_corpus();
  const auto& v = c.social(fcm::Level::variables);
  const auto& kv = c.social(fcm::Level::key_variables);
  const auto& top = c.social(fcm::Level::concepts);
  EXPECT_EQ(v.size(), 186u);
  EXPECT_EQ(kv.size(), 42u);
  EXPECT_EQ(top.size(), 13u);
  EXPECT_EQ(v.edge_count(), 2682u);
  EXPECT_EQ(kv.edge_count(), 771u);
  EXPECT_EQ(top.edge_count(), 135u);
  for (const auto& w : c.warnings()) ADD_FAILURE() << w;
}

}  // namespace

namespace {

fcm::Corpus in_memory(const fcm::SyntheticCorpus& s) {
  std::vector<fcm::FcmModel> maps;
  for (const auto& e : s.manifest.entries) {
    const auto sidecar = nlohmann::json::parse(s.files.at(fcm::sidecar_path(e.path).generic_string()));
    maps.push_back(fcm::parse_fcm_csv(s.files.at(e.path.generic_string()), e.source_format, &sidecar));
  }
  return fcm::Corpus::build(std::move(maps), s.hierarchy);
}

TEST(SyntheticCorpus, EdgeCountsHoldAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    fcm::CorpusSpec spec;
    spec.seed = seed;
    const auto s = fcm::make_synthetic_corpus(spec);
    const auto c = in_memory(s);
    EXPECT_EQ(c.social(fcm::Level::variables).edge_count(), 2682u) << seed;
    EXPECT_EQ(c.social(fcm::Level::key_variables).edge_count(), 771u) << seed;
    EXPECT_EQ(c.social(fcm::Level::concepts).edge_count(), 135u) << seed;
    EXPECT_TRUE(c.warnings().empty()) << seed;
  }
}

}  // namespace

namespace {

using fcm::Level;

TEST(SyntheticCorpus, SameSpecSameBytes) {
  fcm::CorpusSpec spec;
  spec.seed = 7;
  const auto a = fcm::make_synthetic_corpus(spec);
  const auto b = fcm::make_synthetic_corpus(spec);
  EXPECT_EQ(a.files, b.files);
  spec.seed = 8;
  EXPECT_NE(fcm::make_synthetic_corpus(spec).files, a.files);
}

TEST(SyntheticCorpus, OneVariableMapPerStakeholderWithSidecars) {
  const auto s = fcm::make_synthetic_corpus({});
  ASSERT_EQ(s.manifest.entries.size(), 35u);
  EXPECT_EQ(s.manifest.entries.front().stakeholder_id, "S01");
  EXPECT_EQ(s.manifest.entries.back().stakeholder_id, "S35");
  std::size_t csv = 0;
  std::size_t json = 0;
  for (const auto& [path, text] : s.files) {
    if (path.ends_with(".csv")) ++csv;
    if (path.starts_with("maps/") && path.ends_with(".json")) ++json;
    EXPECT_FALSE(text.empty()) << path;
  }
  EXPECT_EQ(csv, 35u);
  EXPECT_EQ(json, 35u);
  EXPECT_TRUE(s.files.contains("manifest.json"));
  EXPECT_TRUE(s.files.contains("hierarchy.json"));
}

TEST(SyntheticCorpus, CustomSizesUseMatchingDensity) {
  fcm::CorpusSpec spec;
  spec.n_maps = 6;
  spec.level_sizes = {40, 12, 5};
  const auto budget = spec.edge_budget();
  EXPECT_EQ(budget[2], static_cast<std::size_t>(std::lround(135.0 / (13 * 12) * 5 * 4)));
  const auto s = fcm::make_synthetic_corpus(spec);
  EXPECT_EQ(s.hierarchy.ids_at(Level::variables).size(), 40u);
  EXPECT_EQ(s.hierarchy.ids_at(Level::key_variables).size(), 12u);
  EXPECT_EQ(s.hierarchy.ids_at(Level::concepts).size(), 5u);
  const auto c = in_memory(s);
  for (int l = 0; l < 3; ++l) {
    EXPECT_EQ(c.social(static_cast<Level>(l)).edge_count(), budget[static_cast<std::size_t>(l)]) << l;
  }
}

TEST(SyntheticCorpus, RejectsImpossibleBudgets) {
  fcm::CorpusSpec spec;
  spec.n_maps = 0;
  EXPECT_THROW(spec.validate(), fcm::Error);
  spec = {};
  spec.edge_counts = {0, 0, 13 * 12 + 1};
  EXPECT_THROW(spec.validate(), fcm::Error);
  spec = {};
  spec.share_probability = 1.5;
  EXPECT_THROW(spec.validate(), fcm::Error);
  spec = {};
  spec.level_sizes = {10, 20, 5};
  EXPECT_THROW(spec.validate(), fcm::Error);
}

TEST(ReferenceCorpus, ModelIdsAreQualifiedByLevel) {
  const auto& c = reference_corpus();
  const auto ids = c.model_ids();
  EXPECT_EQ(ids.front(), "variables.social");
  const auto has = [&](const std::string& id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
  EXPECT_TRUE(has("variables.S01"));
  EXPECT_TRUE(has("key_variables.farmers"));
  EXPECT_TRUE(has("concepts.social"));
  // 3 levels x (1 social + 5 groups + 35 individuals)
  EXPECT_EQ(ids.size(), 3u * 41u);
  EXPECT_EQ(fcm::model_id(c.model("concepts.S07")), "concepts.S07");
  EXPECT_EQ(c.find("concepts.nobody"), nullptr);
  try {
    (void)c.model("concepts.nobody");
    FAIL();
  } catch (const fcm::Error& e) {
    EXPECT_EQ(e.kind(), fcm::ErrorKind::not_found);
  }
}

TEST(ReferenceCorpus, CondensedMapsPointAtTheirSource) {
  const auto& m = reference_corpus().model("concepts.S03");
  EXPECT_EQ(m.provenance().kind, "individual");
  EXPECT_EQ(m.provenance().source_map, "S03@key_variables");
}

TEST(ReferenceCorpus, SocialMentionCountsCountStakeholders) {
  const auto& c = reference_corpus();
  for (int l = 0; l < 3; ++l) {
    const auto& lv = c.level(static_cast<Level>(l));
    const auto& social = *lv.social;
    for (const auto& node : social.nodes()) {
      int expected = 0;
      for (const auto& m : lv.individual) expected += m.find(node.id) ? 1 : 0;
      EXPECT_EQ(node.mention_count, expected) << node.id;
      EXPECT_GE(node.mention_count, 1);
    }
  }
}

TEST(ReferenceCorpus, GroupsRebuildTheSameSocialNodeSet) {
  fcm::PipelineOptions opts;
  opts.social_from_groups = true;
  const auto via_groups = fcm::Corpus::load(reference_manifest(), opts);
  const auto& direct = reference_corpus();
  for (int l = 0; l < 3; ++l) {
    const auto level = static_cast<Level>(l);
    const auto& a = via_groups.social(level);
    const auto& b = direct.social(level);
    EXPECT_EQ(a.ids(), b.ids());
    EXPECT_EQ(a.edge_count(), b.edge_count());
    EXPECT_EQ(a.provenance().contributors.size(), via_groups.level(level).groups.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.node(i).mention_count, b.node(i).mention_count) << a.node(i).id;
    }
  }
}

TEST(ReferenceCorpus, ResultsDoNotDependOnThreadCount) {
  fcm::PipelineOptions one;
  one.threads = 1;
  const auto serial = fcm::Corpus::load(reference_manifest(), one);
  const auto& parallel = reference_corpus();
  for (const auto& id : parallel.model_ids()) {
    const auto& a = serial.model(id);
    const auto& b = parallel.model(id);
    ASSERT_EQ(a.ids(), b.ids()) << id;
    const auto va = a.weights().values();
    const auto vb = b.weights().values();
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin(), vb.end())) << id;
  }
}

TEST(ReferenceCorpus, ConceptSocialMapConvergesFromPreset) {
  fcm::ScenarioSpec spec;
  spec.preset = "jordan-2013";
  const auto& c = reference_corpus();
  const auto r = fcm::run(c.social(Level::concepts), spec, &c.hierarchy());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 50);
  for (double a : r.steady_state) {
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, 1.0);
  }
}

TEST(DrillDown, EconomicConceptHasFourKeyVariables) {
  const auto& c = reference_corpus();
  const auto batch = fcm::drill_down(c, "F");
  EXPECT_EQ(batch.level, Level::key_variables);
  EXPECT_EQ(batch.model_id, "key_variables.social");
  ASSERT_EQ(batch.scenarios.size(), 4u);
  const std::vector<std::string> expected{"FA", "FB", "FC", "FD"};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = batch.scenarios[i];
    EXPECT_EQ(s.node_id, expected[i]);
    EXPECT_TRUE(s.result.converged);
    EXPECT_EQ(s.spec.clamps.at(expected[i]), 1.0);
    EXPECT_EQ(s.comparison.delta_of(expected[i]), 1.0 - batch.baseline.steady_state[
        static_cast<std::size_t>(std::find(batch.baseline.ids.begin(), batch.baseline.ids.end(), expected[i]) -
                                 batch.baseline.ids.begin())]);
  }
  EXPECT_EQ(c.hierarchy().children_of("FD").size(), 1u);
  const auto fd = fcm::drill_down(c, "FD");
  EXPECT_EQ(fd.level, Level::variables);
  EXPECT_EQ(fd.scenarios.size(), 1u);
}

TEST(DrillDown, ErrorsByKind) {
  const auto& c = reference_corpus();
  const auto kind_of = [&](std::string_view id) {
    try {
      (void)fcm::drill_down(c, id);
    } catch (const fcm::Error& e) {
      return e.kind();
    }
    return fcm::ErrorKind::io;
  };
  EXPECT_EQ(kind_of("ZZ"), fcm::ErrorKind::not_found);
  EXPECT_EQ(kind_of("FA1"), fcm::ErrorKind::usage);
}

TEST(DrillDown, RepeatedRunsAreIdentical) {
  const auto& c = reference_corpus();
  const auto a = fcm::drill_down(c, "A");
  const auto b = fcm::drill_down(c, "A");
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(RankChildren, RanksEveryKeyVariableOfF) {
  const auto& c = reference_corpus();
  const auto r = fcm::rank_children(c, "F");
  ASSERT_EQ(r.report.candidates.size(), 4u);
  double positive = 0.0;
  for (std::size_t i = 0; i < r.report.candidates.size(); ++i) {
    const auto& s = r.report.candidates[i];
    EXPECT_EQ(s.rank, static_cast<int>(i) + 1);
    EXPECT_TRUE(s.id.starts_with("F"));
    if (s.raw > 0) positive += s.appropriateness;
  }
  EXPECT_NEAR(positive, 100.0, 1e-9);
  for (const auto& g : r.targets.targets) {
    for (const auto& id : g.node_ids) EXPECT_FALSE(id.starts_with("F")) << id;
  }
  const auto doc = r.to_json();
  EXPECT_EQ(doc.at("parent"), "F");
  EXPECT_TRUE(doc.contains("target_sets"));
}

}  // namespace
