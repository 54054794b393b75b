#pragma once

// HTTP facade over a loaded corpus for the scenario explorer: model browsing,
// centrality, simulation (synchronous, or as a polled job for variable-level
// maps), comparison, drill-down and ranking, all under /api/v1.
//
// Routing lives in Service::handle, which needs no sockets; Server binds it
// to an HTTP listener.

#include <cstdint>
#include <memory>
#include <string>

#include "fcm/appropriateness.hpp"
#include "fcm/pipeline.hpp"
#include "fcm/simulation.hpp"

namespace fcm::service {

inline constexpr const char* kApiPrefix = "/api/v1";

struct Request {
  std::string method;
  /// Path without the query string, e.g. "/api/v1/models".
  std::string path;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  /// Defaults every posted scenario starts from.
  ScenarioSpec scenario_defaults;
  CriterionWeights criterion_weights;
  /// Variable-level simulations run as background jobs.
  bool async_variables = true;
  /// Worker threads for drill-down batches; 0 = all cores.
  unsigned threads = 0;
};

/// Deterministic job id: hex FNV-1a of the model id and the canonical spec.
std::string job_id(const std::string& model_id, const ScenarioSpec& spec);

/// The OpenAPI document served at /api/v1/spec.
std::string openapi_json();

/// Thread-safe: every method may be called concurrently. The corpus is never
/// modified; the result cache and the job table are the only shared state.
class Service {
 public:
  explicit Service(std::shared_ptr<const Corpus> corpus, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  const Corpus& corpus() const noexcept { return *corpus_; }
  /// Blocks until every background job has finished.
  void wait_for_jobs();
  /// Entries in the simulation result cache.
  std::size_t cached_results() const;

  /// Cache and job table; defined in the implementation.
  struct State;

 private:
  std::shared_ptr<const Corpus> corpus_;
  ServiceOptions options_;
  std::unique_ptr<State> state_;
};

/// An HTTP listener dispatching every request to a Service.
class Server {
 public:
  explicit Server(Service& service);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fcm::service
