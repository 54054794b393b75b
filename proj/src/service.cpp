#include "fcm/service.hpp"

#include <httplib.h>

#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcm/centrality.hpp"
#include "fcm/errors.hpp"
#include "fcm/model_io.hpp"
#include "fcm/util.hpp"

namespace fcm::service {

namespace {

using json = nlohmann::json;

/// Thrown by request handlers for replies that are not library errors.
struct HttpError {
  int status;
  std::string kind;
  std::string message;
};

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::unconverged:
    case ErrorKind::pipeline: return 422;
    case ErrorKind::io: return 500;
    default: return 400;
  }
}

Response json_response(int status, const json& doc) { return {status, doc.dump(), "application/json"}; }

Response error_response(int status, std::string_view kind, const std::string& message) {
  return json_response(status, {{"error", {{"kind", kind}, {"message", message}}}});
}

std::vector<std::string_view> segments(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto part = path.substr(0, slash);
    if (!part.empty()) out.push_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return out;
}

json parse_body(const Request& request) {
  if (request.body.empty()) return json::object();
  try {
    auto doc = json::parse(request.body);
    if (!doc.is_object()) throw HttpError{400, "validation", "request body must be a JSON object"};
    return doc;
  } catch (const json::parse_error& e) {
    throw HttpError{400, "parse", std::string("request body is not valid JSON: ") + e.what()};
  }
}

std::string required_string(const json& body, const char* key) {
  if (!body.contains(key) || !body.at(key).is_string()) {
    throw HttpError{400, "validation", std::string("\"") + key + "\" (string) is required"};
  }
  return body.at(key).get<std::string>();
}

json result_json(const SimulationResult& r, bool trajectory) {
  auto doc = r.to_json();
  if (!trajectory) doc.erase("trajectory");
  return doc;
}

json model_summary(const FcmModel& m) {
  const auto& p = m.provenance();
  return {{"id", model_id(m)},
          {"level", to_string(m.level())},
          {"kind", p.kind},
          {"stakeholder", p.stakeholder_id},
          {"group", p.group_id},
          {"nodes", m.size()},
          {"edges", m.edge_count()}};
}

}  // namespace

namespace detail {

struct Job {
  std::string id;
  std::string model;
  std::string canonical;
  ScenarioSpec spec;
  // guarded by State::jobs_mutex
  std::string status = "running";
  std::shared_ptr<const SimulationResult> result;
  std::optional<std::pair<int, nlohmann::json>> error;
};

}  // namespace detail

using detail::Job;

struct Service::State {
  mutable std::shared_mutex cache_mutex;
  // key: model id + '\n' + canonical spec; the full text, so keys never collide
  std::map<std::string, std::shared_ptr<const SimulationResult>> results;
  std::map<std::string, std::shared_ptr<const json>> centrality;

  std::mutex jobs_mutex;
  std::condition_variable jobs_done;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::vector<std::thread> workers;
  std::size_t running = 0;

  std::shared_ptr<const SimulationResult> cached(const std::string& key) const {
    std::shared_lock lock(cache_mutex);
    const auto it = results.find(key);
    return it == results.end() ? nullptr : it->second;
  }

  std::shared_ptr<const SimulationResult> store(const std::string& key, SimulationResult result) {
    auto value = std::make_shared<const SimulationResult>(std::move(result));
    std::unique_lock lock(cache_mutex);
    // first writer wins; equal specs give equal results, so either is fine
    return results.emplace(key, std::move(value)).first->second;
  }

  std::shared_ptr<const SimulationResult> run_cached(const FcmModel& m, const ScenarioSpec& spec,
                                                     const CondensationHierarchy& h) {
    const auto key = model_id(m) + "\n" + spec.canonical();
    if (auto hit = cached(key)) return hit;
    return store(key, run(m, spec, &h));
  }
};

std::string job_id(const std::string& model_id, const ScenarioSpec& spec) {
  return hex64(fnv1a64(model_id + "\n" + spec.canonical()));
}

Service::Service(std::shared_ptr<const Corpus> corpus, ServiceOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)), state_(std::make_unique<State>()) {
  if (!corpus_) fail(ErrorKind::usage, "service needs a corpus");
  options_.scenario_defaults.validate();
  options_.criterion_weights.validate();
}

Service::~Service() {
  wait_for_jobs();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(state_->jobs_mutex);
    workers.swap(state_->workers);
  }
  for (auto& t : workers) t.join();
}

void Service::wait_for_jobs() {
  std::unique_lock lock(state_->jobs_mutex);
  state_->jobs_done.wait(lock, [&] { return state_->running == 0; });
}

std::size_t Service::cached_results() const {
  std::shared_lock lock(state_->cache_mutex);
  return state_->results.size();
}

namespace {

class Router {
 public:
  Router(const Corpus& corpus, const ServiceOptions& options, Service::State& state)
      : corpus_(corpus), options_(options), state_(state) {}

  Response route(const Request& request) {
    const auto parts = segments(request.path);
    const auto prefix = segments(kApiPrefix);
    if (parts.size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), parts.begin())) {
      throw HttpError{404, "not-found", "no route " + request.path};
    }
    const std::vector<std::string_view> rest(parts.begin() + static_cast<std::ptrdiff_t>(prefix.size()), parts.end());
    const auto& m = request.method;

    if (m == "GET" && rest.size() == 1 && rest[0] == "spec") return {200, openapi_json(), "application/json"};
    if (m == "GET" && rest.size() == 1 && rest[0] == "models") return list_models();
    if (m == "GET" && rest.size() == 2 && rest[0] == "models") return get_model(std::string(rest[1]));
    if (m == "GET" && rest.size() == 3 && rest[0] == "models" && rest[2] == "centrality") {
      return get_centrality(std::string(rest[1]));
    }
    if (m == "GET" && rest.size() == 2 && rest[0] == "jobs") return get_job(std::string(rest[1]));
    if (m == "POST" && rest.size() == 1) {
      const auto body = parse_body(request);
      if (rest[0] == "simulate") return simulate(body);
      if (rest[0] == "compare") return compare_runs(body);
      if (rest[0] == "drill") return drill(body);
      if (rest[0] == "rank") return rank(body);
    }
    const bool known = !rest.empty() && (rest[0] == "spec" || rest[0] == "models" || rest[0] == "jobs" ||
                                         rest[0] == "simulate" || rest[0] == "compare" || rest[0] == "drill" ||
                                         rest[0] == "rank");
    if (known) throw HttpError{405, "method-not-allowed", m + " is not allowed on " + request.path};
    throw HttpError{404, "not-found", "no route " + request.path};
  }

 private:
  const FcmModel& model(const std::string& id) const { return corpus_.model(id); }

  /// defaults < request fields
  ScenarioSpec scenario(const json& body, const char* key) const {
    auto doc = options_.scenario_defaults.to_json();
    if (body.contains(key)) {
      const auto& given = body.at(key);
      if (!given.is_object()) throw HttpError{400, "validation", std::string("\"") + key + "\" must be an object"};
      for (const auto& [k, v] : given.items()) doc[k] = v;
    }
    return ScenarioSpec::from_json(doc);
  }

  static bool flag(const json& body, const char* key) {
    return body.contains(key) && body.at(key).is_boolean() && body.at(key).get<bool>();
  }

  std::shared_ptr<const SimulationResult> run_cached(const FcmModel& m, const ScenarioSpec& spec) {
    return state_.run_cached(m, spec, corpus_.hierarchy());
  }

  Response list_models() const {
    json models = json::array();
    for (const auto& id : corpus_.model_ids()) models.push_back(model_summary(model(id)));
    return json_response(200, {{"models", std::move(models)}});
  }

  Response get_model(const std::string& id) const {
    const auto& m = model(id);
    const auto& h = corpus_.hierarchy();
    auto doc = model_json(m);
    doc["id"] = id;
    doc["density"] = density(m);
    for (auto& node : doc["nodes"]) {
      const auto node_id = node["id"].get<std::string>();
      if (!h.contains(node_id)) continue;
      const auto& parent = h.parent_of(node_id);
      node["parent"] = parent ? json(*parent) : json(nullptr);
      node["children"] = h.children_of(node_id);
    }
    json edges = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m.weight(i, j) != 0.0) edges.push_back({{"from", m.node(i).id}, {"to", m.node(j).id}, {"beta", m.weight(i, j)}});
      }
    }
    doc["edges"] = std::move(edges);
    return json_response(200, doc);
  }

  Response get_centrality(const std::string& id) {
    const auto& m = model(id);
    {
      std::shared_lock lock(state_.cache_mutex);
      const auto it = state_.centrality.find(id);
      if (it != state_.centrality.end()) return json_response(200, *it->second);
    }
    auto doc = analyze_centrality(m, corpus_.options().centrality).to_json();
    doc["model"] = id;
    auto value = std::make_shared<const json>(std::move(doc));
    std::unique_lock lock(state_.cache_mutex);
    return json_response(200, *state_.centrality.emplace(id, std::move(value)).first->second);
  }

  Response simulate(const json& body) {
    const auto& m = model(required_string(body, "model"));
    const auto spec = scenario(body, "spec");
    spec.validate_for(m);
    const bool trajectory = flag(body, "trajectory");
    const auto id = model_id(m);
    if (!(options_.async_variables && m.level() == Level::variables)) {
      const auto result = run_cached(m, spec);
      return json_response(200, {{"model", id}, {"spec", spec.to_json()}, {"result", result_json(*result, trajectory)}});
    }
    return submit(m, spec);
  }

  Response submit(const FcmModel& m, const ScenarioSpec& spec) {
    auto job = std::make_shared<Job>();
    job->model = model_id(m);
    job->spec = spec;
    job->canonical = spec.canonical();
    job->id = job_id(job->model, spec);
    const json handle = {{"job", job->id}, {"model", job->model}, {"href", std::string(kApiPrefix) + "/jobs/" + job->id}};
    std::lock_guard lock(state_.jobs_mutex);
    if (const auto it = state_.jobs.find(job->id); it != state_.jobs.end()) {
      if (it->second->model != job->model || it->second->canonical != job->canonical) {
        throw HttpError{500, "consistency", "job id collision for " + job->id};
      }
      auto doc = handle;
      doc["status"] = it->second->status;
      doc["error"] = {{"kind", "duplicate-job"}, {"message", "this scenario was already submitted"}};
      return json_response(409, doc);
    }
    state_.jobs.emplace(job->id, job);
    ++state_.running;
    // the worker outlives this request; it holds only service-lifetime references
    auto& state = state_;
    const auto& h = corpus_.hierarchy();
    state_.workers.emplace_back([&state, &h, &m, job] {
      std::shared_ptr<const SimulationResult> result;
      std::optional<std::pair<int, json>> error;
      try {
        result = state.run_cached(m, job->spec, h);
      } catch (const Error& e) {
        error = std::pair{status_for(e.kind()), json{{"kind", to_string(e.kind())}, {"message", e.what()}}};
      } catch (const std::exception& e) {
        error = std::pair{500, json{{"kind", "internal"}, {"message", e.what()}}};
      }
      std::lock_guard done(state.jobs_mutex);
      job->result = std::move(result);
      job->error = std::move(error);
      job->status = job->error ? "failed" : "done";
      --state.running;
      state.jobs_done.notify_all();
    });
    auto doc = handle;
    doc["status"] = "running";
    return json_response(202, doc);
  }

  Response get_job(const std::string& id) {
    std::lock_guard lock(state_.jobs_mutex);
    const auto it = state_.jobs.find(id);
    if (it == state_.jobs.end()) throw HttpError{404, "not-found", "no job '" + id + "'"};
    const auto& job = *it->second;
    json doc = {{"job", job.id}, {"model", job.model}, {"status", job.status}, {"spec", job.spec.to_json()}};
    if (job.result) doc["result"] = result_json(*job.result, false);
    if (job.error) doc["error"] = job.error->second;
    return json_response(200, doc);
  }

  Response compare_runs(const json& body) {
    const auto& m = model(required_string(body, "model"));
    const auto policy_spec = scenario(body, "policy");
    ScenarioSpec baseline_spec;
    if (body.contains("baseline")) {
      baseline_spec = scenario(body, "baseline");
    } else {
      baseline_spec = policy_spec;
      baseline_spec.clamps.clear();
    }
    std::vector<std::string> targets;
    if (body.contains("targets")) {
      try {
        targets = body.at("targets").get<std::vector<std::string>>();
      } catch (const json::exception&) {
        throw HttpError{400, "validation", "\"targets\" must be an array of node ids"};
      }
    }
    baseline_spec.validate_for(m);
    policy_spec.validate_for(m);
    for (const auto& t : targets) (void)m.index_of(t);
    const auto baseline = run_cached(m, baseline_spec);
    const auto policy = run_cached(m, policy_spec);
    const auto comparison = compare(*baseline, *policy, targets);
    return json_response(200, {{"model", model_id(m)},
                               {"baseline_spec", baseline_spec.to_json()},
                               {"policy_spec", policy_spec.to_json()},
                               {"baseline", result_json(*baseline, false)},
                               {"policy", result_json(*policy, false)},
                               {"comparison", comparison.to_json()}});
  }

  std::string parent_of_request(const json& body) const {
    if (body.contains("parent")) return required_string(body, "parent");
    return required_string(body, "concept");
  }

  Response drill(const json& body) {
    const auto parent = parent_of_request(body);
    const auto spec = scenario(body, "spec");
    double clamp_value = 1.0;
    if (body.contains("clamp_value")) {
      if (!body.at("clamp_value").is_number()) throw HttpError{400, "validation", "\"clamp_value\" must be a number"};
      clamp_value = body.at("clamp_value").get<double>();
    }
    const auto batch = drill_down(corpus_, parent, spec, clamp_value);
    return json_response(200, batch.to_json(flag(body, "trajectory")));
  }

  Response rank(const json& body) {
    const auto parent = parent_of_request(body);
    const auto spec = scenario(body, "spec");
    auto weights = options_.criterion_weights;
    if (body.contains("weights")) {
      const auto& w = body.at("weights");
      if (w.is_string()) {
        weights = parse_criterion_weights(w.get<std::string>());
      } else if (w.is_array() && w.size() == 3 && w[0].is_number() && w[1].is_number() && w[2].is_number()) {
        weights = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()};
      } else if (w.is_object()) {
        weights = {w.value("importance", weights.importance), w.value("feasibility", weights.feasibility),
                   w.value("influence", weights.influence)};
      } else {
        throw HttpError{400, "validation", "\"weights\" must be \"i,f,n\", [i, f, n] or an object"};
      }
    }
    std::optional<TargetSets> targets;
    if (body.contains("targets")) targets = TargetSets::from_json(body.at("targets"));
    return json_response(200, rank_children(corpus_, parent, spec, weights, targets).to_json());
  }

  const Corpus& corpus_;
  const ServiceOptions& options_;
  Service::State& state_;
};

}  // namespace

Response Service::handle(const Request& request) {
  try {
    return Router(*corpus_, options_, *state_).route(request);
  } catch (const HttpError& e) {
    return error_response(e.status, e.kind, e.message);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

// ------------------------------------------------------------------ OpenAPI

std::string openapi_json() {
  const auto ref = [](const char* name) { return json{{"$ref", std::string("#/components/schemas/") + name}}; };
  const auto body = [&](const char* schema) {
    return json{{"required", true}, {"content", {{"application/json", {{"schema", ref(schema)}}}}}};
  };
  const auto reply = [&](const char* description) {
    return json{{"description", description}, {"content", {{"application/json", {{"schema", {{"type", "object"}}}}}}}};
  };
  const auto errors = [&](json responses, std::initializer_list<const char*> codes) {
    for (const auto* code : codes) {
      responses[code] = {{"description", "error"},
                         {"content", {{"application/json", {{"schema", ref("Error")}}}}}};
    }
    return responses;
  };
  const json model_id_param = {{"name", "id"}, {"in", "path"}, {"required", true},
                               {"schema", {{"type", "string"}}}, {"example", "concepts.social"}};
  const json scenario_schema = {
      {"type", "object"},
      {"properties",
       {{"initial_state", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}},
        {"clamps", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}},
        {"preset", {{"type", "string"}, {"nullable", true}, {"enum", json::array({"jordan-2013", "uniform"})}}},
        {"lambda", {{"type", "number"}}},
        {"tolerance", {{"type", "number"}}},
        {"max_iterations", {{"type", "integer"}}},
        {"weight_scale", {{"type", "number"}}},
        {"default_state", {{"type", "number"}}}}}};
  const json doc = {
      {"openapi", "3.0.3"},
      {"info", {{"title", "fcm service"}, {"version", "1.0.0"}}},
      {"servers", json::array({{{"url", kApiPrefix}}})},
      {"paths",
       {{"/models", {{"get", {{"summary", "List every map of the corpus"}, {"responses", {{"200", reply("models")}}}}}}},
        {"/models/{id}",
         {{"get", {{"summary", "Nodes, edges and hierarchy position of one map"},
                   {"parameters", json::array({model_id_param})},
                   {"responses", errors({{"200", reply("model")}}, {"404"})}}}}},
        {"/models/{id}/centrality",
         {{"get", {{"summary", "Centrality report of one map"},
                   {"parameters", json::array({model_id_param})},
                   {"responses", errors({{"200", reply("centrality report")}}, {"404"})}}}}},
        {"/simulate",
         {{"post", {{"summary", "Run a scenario; variable-level maps answer 202 with a job handle"},
                    {"requestBody", body("SimulateRequest")},
                    {"responses", errors({{"200", reply("simulation result")}, {"202", reply("job handle")}},
                                         {"400", "404", "409"})}}}}},
        {"/jobs/{id}",
         {{"get", {{"summary", "Poll a simulation job"},
                   {"parameters", json::array({{{"name", "id"}, {"in", "path"}, {"required", true},
                                                {"schema", {{"type", "string"}}}}})},
                   {"responses", errors({{"200", reply("job status")}}, {"404"})}}}}},
        {"/compare",
         {{"post", {{"summary", "Steady-state deltas of a policy scenario against a baseline"},
                    {"requestBody", body("CompareRequest")},
                    {"responses", errors({{"200", reply("comparison")}}, {"400", "404", "422"})}}}}},
        {"/drill",
         {{"post", {{"summary", "Clamp each child of a node in turn"},
                    {"requestBody", body("DrillRequest")},
                    {"responses", errors({{"200", reply("drill batch")}}, {"400", "404", "422"})}}}}},
        {"/rank",
         {{"post", {{"summary", "Appropriateness ranking of a node's children"},
                    {"requestBody", body("RankRequest")},
                    {"responses", errors({{"200", reply("ranking")}}, {"400", "404", "422"})}}}}},
        {"/spec", {{"get", {{"summary", "This document"}, {"responses", {{"200", reply("OpenAPI document")}}}}}}}}},
      {"components",
       {{"schemas",
         {{"Scenario", scenario_schema},
          {"SimulateRequest",
           {{"type", "object"},
            {"required", json::array({"model"})},
            {"properties", {{"model", {{"type", "string"}}}, {"spec", ref("Scenario")}, {"trajectory", {{"type", "boolean"}}}}}}},
          {"CompareRequest",
           {{"type", "object"},
            {"required", json::array({"model", "policy"})},
            {"properties",
             {{"model", {{"type", "string"}}},
              {"baseline", ref("Scenario")},
              {"policy", ref("Scenario")},
              {"targets", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}}},
          {"DrillRequest",
           {{"type", "object"},
            {"required", json::array({"parent"})},
            {"properties",
             {{"parent", {{"type", "string"}}},
              {"spec", ref("Scenario")},
              {"clamp_value", {{"type", "number"}}},
              {"trajectory", {{"type", "boolean"}}}}}}},
          {"RankRequest",
           {{"type", "object"},
            {"required", json::array({"parent"})},
            {"properties",
             {{"parent", {{"type", "string"}}},
              {"spec", ref("Scenario")},
              {"weights", {{"description", "\"0.25,0.25,0.5\", [i, f, n] or {importance, feasibility, influence}"}}},
              {"targets", {{"type", "object"}}}}}}},
          {"Error",
           {{"type", "object"},
            {"properties",
             {{"error",
               {{"type", "object"},
                {"properties", {{"kind", {{"type", "string"}}}, {"message", {{"type", "string"}}}}}}}}}}}}}}}};
  return doc.dump();
}

// ------------------------------------------------------------------ HTTP

struct Server::Impl {
  explicit Impl(Service& s) : service(s) {}
  Service& service;
  httplib::Server http;
  int port = 0;
};

Server::Server(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& http = impl_->http;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = impl_->service.handle({req.method, req.path, req.body});
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  http.Get(".*", dispatch);
  http.Post(".*", dispatch);
  http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else {
    impl_->port = impl_->http.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) fail(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
  return impl_->port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace fcm::service
