#include "fcm/service.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fcm/corpus_gen.hpp"
#include "fcm/errors.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using fcm::service::Request;
using fcm::service::Response;
using fcm::service::Service;

std::shared_ptr<const fcm::Corpus> shared_corpus() {
  static const auto corpus = [] {
    const auto dir = fcm::testing::scratch_path("fcm_service_corpus");
    fs::remove_all(dir);
    return std::make_shared<const fcm::Corpus>(fcm::Corpus::load(fcm::generate_synthetic_corpus({}, dir)));
  }();
  return corpus;
}

Response get(Service& s, const std::string& path) { return s.handle({"GET", path, ""}); }
Response post(Service& s, const std::string& path, const json& body) { return s.handle({"POST", path, body.dump()}); }
json body(const Response& r) { return json::parse(r.body); }

TEST(Service, ListsEveryModel) {
  Service s(shared_corpus());
  const auto r = get(s, "/api/v1/models");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto models = body(r)["models"];
  EXPECT_EQ(models.size(), shared_corpus()->model_ids().size());
  EXPECT_EQ(models[0]["id"], "variables.social");
  EXPECT_EQ(models[0]["nodes"], 186);
}

TEST(Service, ConceptSocialMapHasNodesAThroughM) {
  Service s(shared_corpus());
  const auto r = get(s, "/api/v1/models/concepts.social");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = body(r);
  ASSERT_EQ(doc["nodes"].size(), 13u);
  std::string ids;
  for (const auto& n : doc["nodes"]) ids += n["id"].get<std::string>();
  EXPECT_EQ(ids, "ABCDEFGHIJKLM");
  EXPECT_TRUE(doc["nodes"][5]["parent"].is_null());
  EXPECT_EQ(doc["nodes"][5]["children"], json({"FA", "FB", "FC", "FD"}));
  EXPECT_EQ(doc["edges"].size(), 135u);
}

TEST(Service, CentralityReportMatchesLibrary) {
  Service s(shared_corpus());
  const auto r = get(s, "/api/v1/models/concepts.social/centrality");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto expected = fcm::analyze_centrality(shared_corpus()->model("concepts.social")).to_json();
  auto doc = body(r);
  doc.erase("model");
  EXPECT_EQ(doc, expected);
  EXPECT_EQ(get(s, "/api/v1/models/concepts.social/centrality").body, r.body);
}

TEST(Service, UnknownThingsAre404) {
  Service s(shared_corpus());
  EXPECT_EQ(get(s, "/api/v1/models/concepts.nobody").status, 404);
  EXPECT_EQ(get(s, "/api/v1/jobs/0000").status, 404);
  EXPECT_EQ(get(s, "/api/v2/models").status, 404);
  EXPECT_EQ(post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"clamps", {{"Z", 1}}}}}}).status,
            404);
  EXPECT_EQ(post(s, "/api/v1/drill", {{"parent", "QQ"}}).status, 404);
  EXPECT_EQ(s.handle({"DELETE", "/api/v1/models", ""}).status, 405);
}

TEST(Service, InvalidSpecsAre400) {
  Service s(shared_corpus());
  EXPECT_EQ(post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"lambda", -1}}}}).status, 400);
  EXPECT_EQ(post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"clamps", {{"G", 3}}}}}}).status,
            400);
  EXPECT_EQ(post(s, "/api/v1/simulate", {{"spec", json::object()}}).status, 400);
  EXPECT_EQ(s.handle({"POST", "/api/v1/simulate", "{not json"}).status, 400);
  EXPECT_EQ(post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"preset", "nope"}}}}).status, 400);
  EXPECT_EQ(post(s, "/api/v1/rank", {{"parent", "F"}, {"weights", "1,1,1"}}).status, 400);
  const auto err = body(post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"lambda", 0}}}}));
  EXPECT_EQ(err["error"]["kind"], "validation");
}

TEST(Service, EmptyClampSetEqualsLibraryBaseline) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"preset", "jordan-2013"}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  fcm::ScenarioSpec spec;
  spec.preset = "jordan-2013";
  const auto& c = *shared_corpus();
  const auto expected = fcm::run(c.social(fcm::Level::concepts), spec, &c.hierarchy());
  const auto doc = body(r);
  EXPECT_EQ(doc["result"]["steady_state"], json(expected.steady_state));
  EXPECT_EQ(doc["result"]["iterations"], expected.iterations);
  EXPECT_TRUE(doc["result"]["converged"].get<bool>());
}

TEST(Service, CompareClampOnConceptMap) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/compare",
                      {{"model", "concepts.social"}, {"policy", {{"preset", "jordan-2013"}, {"clamps", {{"G", 1.0}}}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = body(r);
  ASSERT_EQ(doc["comparison"]["nodes"].size(), 13u);
  EXPECT_EQ(doc["comparison"]["clamped"], json({"G"}));
  EXPECT_TRUE(doc["baseline_spec"]["clamps"].empty());
}

TEST(Service, UnconvergedComparisonIs422) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/compare",
                      {{"model", "concepts.social"},
                       {"baseline", {{"max_iterations", 1}}},
                       {"policy", {{"clamps", {{"G", 1.0}}}}}});
  EXPECT_EQ(r.status, 422) << r.body;
  EXPECT_EQ(body(r)["error"]["kind"], "unconverged");
}

TEST(Service, VariableLevelSimulationIsAJob) {
  Service s(shared_corpus());
  const json request = {{"model", "variables.social"}, {"spec", {{"clamps", {{"FA1", 1.0}}}}}};
  const auto first = post(s, "/api/v1/simulate", request);
  ASSERT_EQ(first.status, 202) << first.body;
  const auto handle = body(first);
  fcm::ScenarioSpec spec;
  spec.clamps["FA1"] = 1.0;
  EXPECT_EQ(handle["job"], fcm::service::job_id("variables.social", spec));
  EXPECT_EQ(handle["href"], "/api/v1/jobs/" + handle["job"].get<std::string>());

  const auto again = post(s, "/api/v1/simulate", request);
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(body(again)["job"], handle["job"]);

  s.wait_for_jobs();
  const auto polled = body(get(s, "/api/v1/jobs/" + handle["job"].get<std::string>()));
  EXPECT_EQ(polled["status"], "done");
  EXPECT_EQ(polled["result"]["steady_state"].size(), 186u);
  EXPECT_TRUE(polled["result"]["converged"].get<bool>());
}

TEST(Service, FailedJobReportsItsError) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/simulate", {{"model", "variables.social"}, {"spec", {{"max_iterations", 1}}}});
  ASSERT_EQ(r.status, 202);
  s.wait_for_jobs();
  const auto polled = body(get(s, "/api/v1/jobs/" + body(r)["job"].get<std::string>()));
  // a run that stops early is still a result; convergence is reported in it
  EXPECT_EQ(polled["status"], "done");
  EXPECT_FALSE(polled["result"]["converged"].get<bool>());
}

TEST(Service, RankConceptFGivesFourCandidates) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/rank", {{"parent", "F"}});
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = body(r);
  std::set<std::string> ids;
  for (const auto& c : doc["candidates"]) ids.insert(c["id"].get<std::string>());
  EXPECT_EQ(ids, (std::set<std::string>{"FA", "FB", "FC", "FD"}));
  EXPECT_EQ(doc, fcm::rank_children(*shared_corpus(), "F").to_json());
  EXPECT_EQ(post(s, "/api/v1/rank", {{"concept", "F"}, {"weights", {0.25, 0.25, 0.5}}}).body, r.body);
}

TEST(Service, DrillMirrorsLibrary) {
  Service s(shared_corpus());
  const auto r = post(s, "/api/v1/drill", {{"parent", "A"}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(body(r), fcm::drill_down(*shared_corpus(), "A").to_json());
  EXPECT_EQ(post(s, "/api/v1/drill", {{"parent", "FA1"}}).status, 400);
}

TEST(Service, OpenApiDocumentListsEveryRoute) {
  Service s(shared_corpus());
  const auto r = get(s, "/api/v1/spec");
  ASSERT_EQ(r.status, 200);
  const auto doc = body(r);
  EXPECT_EQ(doc["openapi"], "3.0.3");
  for (const char* path : {"/models", "/models/{id}", "/models/{id}/centrality", "/simulate", "/jobs/{id}",
                           "/compare", "/drill", "/rank", "/spec"}) {
    EXPECT_TRUE(doc["paths"].contains(path)) << path;
  }
}

TEST(Service, ConcurrentRequestsGiveIdenticalBodies) {
  Service s(shared_corpus());
  const std::vector<std::pair<std::string, json>> requests = {
      {"/api/v1/simulate", {{"model", "concepts.social"}, {"spec", {{"clamps", {{"G", 1.0}}}}}}},
      {"/api/v1/simulate", {{"model", "key_variables.social"}, {"spec", {{"preset", "jordan-2013"}}}}},
      {"/api/v1/compare", {{"model", "concepts.social"}, {"policy", {{"clamps", {{"H", 0.0}}}}}}},
      {"/api/v1/rank", {{"parent", "F"}}},
      {"/api/v1/drill", {{"parent", "FA"}}},
  };
  std::vector<std::string> expected;
  {
    Service reference(shared_corpus());
    for (const auto& [path, b] : requests) expected.push_back(post(reference, path, b).body);
  }
  constexpr int kThreads = 8;
  constexpr int kRounds = 6;
  std::atomic<int> mismatches{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < kThreads; ++t) {
    pool.emplace_back([&, t] {
      for (int round = 0; round < kRounds; ++round) {
        const auto k = static_cast<std::size_t>(t + round) % requests.size();
        const auto r = post(s, requests[k].first, requests[k].second);
        if (r.status != 200 || r.body != expected[k]) ++mismatches;
        if (get(s, "/api/v1/models/concepts.social/centrality").status != 200) ++mismatches;
      }
    });
  }
  for (auto& t : pool) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_GT(s.cached_results(), 0u);
}

TEST(Service, ConcurrentDuplicateJobsCreateOneJob) {
  Service s(shared_corpus());
  const json request = {{"model", "variables.social"}, {"spec", {{"clamps", {{"BA1", 0.0}}}}}};
  std::atomic<int> accepted{0};
  std::atomic<int> conflicts{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&] {
      const auto r = post(s, "/api/v1/simulate", request);
      if (r.status == 202) ++accepted;
      if (r.status == 409) ++conflicts;
    });
  }
  for (auto& t : pool) t.join();
  EXPECT_EQ(accepted.load(), 1);
  EXPECT_EQ(conflicts.load(), 7);
  s.wait_for_jobs();
}

TEST(Server, ServesOverHttpWithCors) {
  Service s(shared_corpus());
  fcm::service::Server server(s);
  const int port = server.bind("127.0.0.1", 0);
  std::thread listener([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  std::shared_ptr<httplib::Response> res;
  for (int attempt = 0; attempt < 50 && !res; ++attempt) {
    auto r = client.Get("/api/v1/models/concepts.social");
    if (r) {
      res = std::make_shared<httplib::Response>(*r);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(res->body)["nodes"].size(), 13u);

  const auto pre = client.Options("/api/v1/simulate");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "*");

  const auto sim = client.Post("/api/v1/simulate", json{{"model", "concepts.social"}}.dump(), "application/json");
  ASSERT_TRUE(sim);
  EXPECT_EQ(sim->status, 200);
  EXPECT_EQ(sim->body, post(s, "/api/v1/simulate", {{"model", "concepts.social"}}).body);

  server.stop();
  listener.join();
}

}  // namespace
