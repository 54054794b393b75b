#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "fcm/aggregation.hpp"
#include "fcm/appropriateness.hpp"
#include "fcm/centrality.hpp"
#include "fcm/condensation.hpp"
#include "fcm/corpus_gen.hpp"
#include "fcm/errors.hpp"
#include "fcm/hierarchy.hpp"
#include "fcm/model_io.hpp"
#include "fcm/pipeline.hpp"
#include "fcm/service.hpp"
#include "fcm/simulation.hpp"
#include "fcm/util.hpp"

namespace fcm::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::configuration: return kUsage;
    case ErrorKind::parse: return kParse;
    case ErrorKind::input_range:
    case ErrorKind::degenerate_input:
    case ErrorKind::shape:
    case ErrorKind::validation:
    case ErrorKind::consistency:
    case ErrorKind::hierarchy:
    case ErrorKind::invalid_pair:
    case ErrorKind::pipeline: return kValidation;
    case ErrorKind::unconverged: return kUnconverged;
    case ErrorKind::io: return kIo;
    case ErrorKind::not_found: return kNotFound;
  }
  return kFailure;
}

namespace {

// ------------------------------------------------------------------ outputs

/// Files produced by one subcommand. Nothing touches the output directory
/// until every file has been rendered and staged.
class OutputSet {
 public:
  void add(const fs::path& relative, std::string content) { files_[relative] = std::move(content); }
  void add_model(const fs::path& relative_csv, const FcmModel& m, SourceFormat format) {
    add(relative_csv, format_fcm_csv(m, format));
    add(sidecar_path(relative_csv), sidecar_json(m, format).dump(1) + "\n");
  }
  std::size_t size() const { return files_.size(); }

  void commit(const fs::path& dir) const {
    auto target = fs::absolute(dir).lexically_normal();
    if (target.filename().empty()) target = target.parent_path();
    const auto staging = target.parent_path() / ("." + target.filename().string() + ".staging");
    try {
      fs::remove_all(staging);
      for (const auto& [rel, content] : files_) {
        fs::create_directories((staging / rel).parent_path());
        write_text_file_atomic(staging / rel, content);
      }
      for (const auto& [rel, content] : files_) {
        fs::create_directories((target / rel).parent_path());
        fs::rename(staging / rel, target / rel);
      }
      fs::remove_all(staging);
    } catch (const fs::filesystem_error& e) {
      std::error_code ignored;
      fs::remove_all(staging, ignored);
      fail(ErrorKind::io, std::string("cannot write outputs: ") + e.what());
    }
  }

 private:
  std::map<fs::path, std::string> files_;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  PipelineConfig config;
  bool json = false;
  std::optional<fs::path> out_file;
};

/// A report goes to --out when given (atomically), otherwise to stdout.
void emit(Context& ctx, const std::string& text, const nlohmann::json& doc) {
  const auto body = ctx.json ? doc.dump(2) + "\n" : text;
  if (ctx.out_file) {
    write_text_file_atomic(*ctx.out_file, body);
  } else {
    ctx.out << body;
  }
}

void warn_all(Context& ctx, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) ctx.err << "warning: " << w << "\n";
}

// ------------------------------------------------------------------ parsing helpers

std::array<double, 3> parse_triple(const std::string& text, const char* what) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) fail(ErrorKind::usage, std::string(what) + " needs three comma-separated numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = parse_double(trim(parts[i]));
    if (!v) fail(ErrorKind::usage, std::string(what) + ": '" + parts[i] + "' is not a number");
    out[i] = *v;
  }
  return out;
}

std::array<std::size_t, 3> parse_sizes(const std::string& text, const char* what) {
  const auto v = parse_triple(text, what);
  std::array<std::size_t, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (v[i] < 0 || v[i] != static_cast<double>(static_cast<std::size_t>(v[i]))) {
      fail(ErrorKind::usage, std::string(what) + " must be non-negative integers");
    }
    out[i] = static_cast<std::size_t>(v[i]);
  }
  return out;
}

/// "G=1.0" pairs.
std::map<std::string, double> parse_assignments(const std::vector<std::string>& items, const char* what) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    const auto value = eq == std::string::npos ? std::nullopt : parse_double(trim(item.substr(eq + 1)));
    if (!value || eq == 0) fail(ErrorKind::usage, std::string(what) + " expects ID=VALUE, got '" + item + "'");
    out[trim(item.substr(0, eq))] = *value;
  }
  return out;
}

std::vector<std::string> parse_ids(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& part : split(text, ',')) {
    if (!trim(part).empty()) out.push_back(trim(part));
  }
  return out;
}

nlohmann::json read_json_file(const fs::path& path, const char* what) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse, std::string(what) + " " + path.string() + " is not valid JSON: " + e.what());
  }
}

FcmModel load_model_file(const fs::path& path, const std::optional<std::string>& format) {
  if (path.extension() == ".json" && !fs::exists(sidecar_path(path))) {
    return model_from_json(read_json_file(path, "model"));
  }
  LoadOptions options;
  if (format) options.source_format = parse_source_format(*format);
  return load_fcm(path, options);
}

CondensationHierarchy config_hierarchy(const PipelineConfig& config) {
  return config.hierarchy ? CondensationHierarchy::load(*config.hierarchy) : CondensationHierarchy::water_scarcity();
}

fs::path require_manifest(const Context& ctx, const std::string& positional) {
  if (!positional.empty()) return positional;
  if (ctx.config.manifest) return *ctx.config.manifest;
  fail(ErrorKind::usage, "no manifest given (positional argument or \"manifest\" in the config)");
}

// ------------------------------------------------------------------ scenario flags

struct ScenarioFlags {
  std::string spec_file;
  std::string preset;
  double lambda = 0.0;
  double tolerance = 0.0;
  int max_iterations = 0;
  double default_state = 0.0;
  std::vector<std::string> clamps;
  std::vector<std::string> initial;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* tolerance_opt = nullptr;
  CLI::Option* max_iterations_opt = nullptr;
  CLI::Option* default_state_opt = nullptr;

  void attach(CLI::App* sub, bool with_clamps) {
    sub->add_option("--spec", spec_file, "Scenario JSON (fields override the config)")->check(CLI::ExistingFile);
    sub->add_option("--preset", preset, "Starting-value preset (jordan-2013, uniform or a config preset)");
    lambda_opt = sub->add_option("--lambda", lambda, "Logistic steepness");
    tolerance_opt = sub->add_option("--tolerance", tolerance, "Convergence tolerance on the max change");
    max_iterations_opt = sub->add_option("--max-iterations", max_iterations, "Iteration cap");
    default_state_opt = sub->add_option("--default-state", default_state, "Start value of unlisted nodes");
    sub->add_option("--init", initial, "Starting value, ID=VALUE (repeatable)");
    if (with_clamps) sub->add_option("--clamp", clamps, "Clamped node, ID=VALUE (repeatable)");
  }

  /// defaults < config < --spec file < flags
  ScenarioSpec build(const PipelineConfig& config) const {
    auto doc = config.scenario.to_json();
    if (!spec_file.empty()) {
      const auto file = read_json_file(spec_file, "scenario");
      if (!file.is_object()) fail(ErrorKind::validation, "scenario " + spec_file + " must be a JSON object");
      for (const auto& [k, v] : file.items()) doc[k] = v;
    }
    // config presets are not known to the library; they are expanded later
    std::optional<std::string> preset_name;
    if (doc.contains("preset") && !doc["preset"].is_null()) {
      if (!doc["preset"].is_string()) fail(ErrorKind::validation, "preset must be a string");
      preset_name = doc["preset"].get<std::string>();
    }
    doc["preset"] = nullptr;
    auto spec = ScenarioSpec::from_json(doc);
    spec.preset = preset.empty() ? preset_name : std::optional(preset);
    const auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(lambda_opt)) spec.lambda = lambda;
    if (given(tolerance_opt)) spec.tolerance = tolerance;
    if (given(max_iterations_opt)) spec.max_iterations = max_iterations;
    if (given(default_state_opt)) spec.default_state = default_state;
    for (const auto& [id, v] : parse_assignments(initial, "--init")) spec.initial_state[id] = v;
    for (const auto& [id, v] : parse_assignments(clamps, "--clamp")) spec.clamps[id] = v;
    return spec;
  }
};

// ------------------------------------------------------------------ subcommands

struct GenCorpusArgs {
  std::string out;
  std::uint64_t seed = 1;
  std::size_t maps = 35;
  std::string sizes;
  std::string edges;
  double share = 0.05;
  double dissent = 0.05;
};

int cmd_gen_corpus(Context& ctx, const GenCorpusArgs& a) {
  CorpusSpec spec;
  spec.seed = a.seed;
  spec.n_maps = a.maps;
  if (!a.sizes.empty()) spec.level_sizes = parse_sizes(a.sizes, "--sizes");
  if (!a.edges.empty()) spec.edge_counts = parse_sizes(a.edges, "--edges");
  spec.share_probability = a.share;
  spec.dissent_probability = a.dissent;
  spec.validate();
  const auto corpus = make_synthetic_corpus(spec);
  const fs::path dir = a.out.empty() ? ctx.config.output_dir / "corpus" : fs::path(a.out);
  OutputSet files;
  for (const auto& [rel, content] : corpus.files) files.add(rel, content);
  files.commit(dir);
  const auto budget = spec.edge_budget();
  const nlohmann::json doc = {{"manifest", (dir / "manifest.json").generic_string()},
                              {"maps", corpus.manifest.entries.size()},
                              {"seed", spec.seed},
                              {"level_sizes", spec.level_sizes},
                              {"edge_budget", budget},
                              {"support_edges", corpus.support_edges}};
  ctx.out_file.reset();
  emit(ctx,
       "wrote " + std::to_string(corpus.manifest.entries.size()) + " maps to " + dir.generic_string() + "\n", doc);
  return kOk;
}

struct ConvertArgs {
  std::string manifest;
  std::string out;
  std::string format = "beta";
};

/// Writes `maps` under <level>/<stakeholder>.csv with a manifest and the hierarchy.
OutputSet corpus_outputs(const std::vector<const FcmModel*>& maps, const CondensationHierarchy& h,
                         SourceFormat format) {
  OutputSet files;
  CorpusManifest manifest;
  manifest.hierarchy = "hierarchy.json";
  for (const auto* m : maps) {
    const auto& p = m->provenance();
    const fs::path rel = fs::path(std::string(to_string(p.level))) / (p.stakeholder_id + ".csv");
    files.add_model(rel, *m, format);
    ManifestEntry e;
    e.path = rel;
    e.stakeholder_id = p.stakeholder_id;
    e.group_id = p.group_id;
    e.level = p.level;
    e.source_format = format;
    manifest.entries.push_back(std::move(e));
  }
  files.add("hierarchy.json", h.to_json().dump(1) + "\n");
  files.add("manifest.json", manifest.to_json().dump(1) + "\n");
  return files;
}

int cmd_convert(Context& ctx, const ConvertArgs& a) {
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  const auto format = parse_source_format(a.format);
  const auto h = load_hierarchy(manifest);
  const auto maps = load_maps(manifest, ctx.config.threads);
  std::vector<const FcmModel*> pointers;
  for (const auto& m : maps) {
    h.validate_model(m);
    pointers.push_back(&m);
  }
  const fs::path dir = a.out.empty() ? ctx.config.output_dir / "converted" : fs::path(a.out);
  corpus_outputs(pointers, h, format).commit(dir);
  ctx.out_file.reset();
  emit(ctx, "converted " + std::to_string(maps.size()) + " maps to " + dir.generic_string() + "\n",
       {{"manifest", (dir / "manifest.json").generic_string()}, {"maps", maps.size()}, {"format", a.format}});
  return kOk;
}

struct CondenseArgs {
  std::string manifest;
  std::string out;
  std::string level;
};

int cmd_condense(Context& ctx, const CondenseArgs& a) {
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  const auto h = load_hierarchy(manifest);
  const auto maps = load_maps(manifest, ctx.config.threads);
  if (maps.empty()) fail(ErrorKind::pipeline, "the manifest lists no maps");
  Level level = maps.front().level();
  for (const auto& m : maps) level = std::min(level, m.level());
  if (!a.level.empty()) level = parse_level(a.level);
  const auto next = parent_level(level);
  if (!next) fail(ErrorKind::usage, "concept maps cannot be condensed further");

  std::vector<const FcmModel*> sources;
  for (const auto& m : maps) {
    h.validate_model(m);
    if (m.level() == level) sources.push_back(&m);
  }
  if (sources.empty()) fail(ErrorKind::pipeline, "the manifest has no " + std::string(to_string(level)) + " maps");
  const auto condensed = condense_maps(sources, h, ctx.config.pipeline());
  std::vector<const FcmModel*> outputs;
  for (const auto& m : condensed) outputs.push_back(&m);

  const fs::path dir = a.out.empty() ? ctx.config.output_dir / std::string(to_string(*next)) : fs::path(a.out);
  corpus_outputs(outputs, h, SourceFormat::beta).commit(dir);
  const auto nodes = condensed.empty() ? 0 : h.ids_at(*next).size();
  ctx.out_file.reset();
  emit(ctx,
       "condensed " + std::to_string(condensed.size()) + " " + std::string(to_string(level)) + " maps to " +
           std::string(to_string(*next)) + " in " + dir.generic_string() + "\n",
       {{"manifest", (dir / "manifest.json").generic_string()},
        {"maps", condensed.size()},
        {"from", to_string(level)},
        {"to", to_string(*next)},
        {"hierarchy_nodes", nodes}});
  return kOk;
}

struct AggregateArgs {
  std::string manifest;
  std::string out;
  std::string level;
  std::string group;
  bool all = false;
};

int cmd_aggregate(Context& ctx, const AggregateArgs& a) {
  if (a.all == !a.group.empty()) fail(ErrorKind::usage, "give exactly one of --group or --all");
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  auto maps = load_maps(manifest, ctx.config.threads);
  if (maps.empty()) fail(ErrorKind::pipeline, "the manifest lists no maps");
  Level level = maps.front().level();
  for (const auto& m : maps) level = std::min(level, m.level());
  if (!a.level.empty()) level = parse_level(a.level);
  std::erase_if(maps, [&](const FcmModel& m) { return m.level() != level; });
  if (maps.empty()) fail(ErrorKind::pipeline, "the manifest has no " + std::string(to_string(level)) + " maps");

  const auto corpus = Corpus::build(std::move(maps), load_hierarchy(manifest), ctx.config.pipeline());
  const auto& lv = corpus.level(level);
  std::vector<const FcmModel*> outputs;
  if (a.all) {
    for (const auto& g : lv.groups) outputs.push_back(&g);
    outputs.push_back(&*lv.social);
  } else {
    if (!is_known_group(a.group)) fail(ErrorKind::usage, "unknown group '" + a.group + "'");
    for (const auto& g : lv.groups) {
      if (g.provenance().stakeholder_id == a.group) outputs.push_back(&g);
    }
    if (outputs.empty()) fail(ErrorKind::not_found, "no " + std::string(to_string(level)) + " maps in group " + a.group);
  }
  // only warnings about the maps written here
  std::vector<std::string> notes;
  for (const auto& w : corpus.warnings()) {
    for (const auto* m : outputs) {
      if (w.starts_with(model_id(*m) + ":")) notes.push_back(w);
    }
  }

  OutputSet files;
  nlohmann::json written = nlohmann::json::array();
  for (const auto* m : outputs) {
    const auto name = m->provenance().stakeholder_id + ".csv";
    files.add_model(name, *m, SourceFormat::beta);
    written.push_back({{"file", name}, {"model", model_id(*m)}, {"nodes", m->size()}, {"edges", m->edge_count()}});
  }
  const fs::path dir = a.out.empty() ? ctx.config.output_dir / "aggregate" : fs::path(a.out);
  files.commit(dir);
  warn_all(ctx, notes);
  std::string text;
  for (const auto& w : written) {
    text += w["model"].get<std::string>() + ": " + std::to_string(w["nodes"].get<std::size_t>()) + " nodes, " +
            std::to_string(w["edges"].get<std::size_t>()) + " edges -> " +
            (dir / w["file"].get<std::string>()).generic_string() + "\n";
  }
  ctx.out_file.reset();
  emit(ctx, text, {{"level", to_string(level)}, {"maps", written}, {"warnings", notes}});
  return kOk;
}

struct AnalyzeArgs {
  std::string model;
  std::optional<std::string> format;
  std::string weights;
  std::string edge_length;
};

int cmd_analyze(Context& ctx, const AnalyzeArgs& a) {
  if (!a.weights.empty()) {
    const auto w = parse_triple(a.weights, "--weights");
    ctx.config.prioritization = {w[0], w[1], w[2]};
  }
  if (!a.edge_length.empty()) ctx.config.edge_length = parse_edge_length(a.edge_length);
  ctx.config.validate();
  const auto m = load_model_file(a.model, a.format);
  const auto report = analyze_centrality(m, ctx.config.centrality());
  auto doc = report.to_json();
  doc["model"] = model_id(m);
  emit(ctx, report.to_csv(), doc);
  return kOk;
}

struct SimulateArgs {
  std::string model;
  std::optional<std::string> format;
  std::string targets;
  bool trajectory = false;
  ScenarioFlags scenario;
};

nlohmann::json result_json(const SimulationResult& r, bool trajectory) {
  auto doc = r.to_json();
  if (!trajectory) doc.erase("trajectory");
  return doc;
}

std::string steady_state_csv(const SimulationResult& r) {
  std::string out = "id,steady_state\n";
  for (std::size_t i = 0; i < r.ids.size(); ++i) out += r.ids[i] + "," + format_double(r.steady_state[i]) + "\n";
  return out;
}

int cmd_simulate(Context& ctx, const SimulateArgs& a) {
  const auto m = load_model_file(a.model, a.format);
  const auto h = config_hierarchy(ctx.config);
  const auto policy_spec = ctx.config.resolve_presets(a.scenario.build(ctx.config), m, h);
  auto baseline_spec = policy_spec;
  baseline_spec.clamps.clear();
  policy_spec.validate_for(m);
  const auto targets = parse_ids(a.targets);
  for (const auto& id : targets) (void)m.index_of(id);

  const auto baseline = run(m, baseline_spec, &h);
  if (policy_spec.clamps.empty()) {
    if (!baseline.converged) {
      fail(ErrorKind::unconverged, "no steady state within " + std::to_string(baseline_spec.max_iterations) +
                                       " iterations");
    }
    emit(ctx, steady_state_csv(baseline),
         {{"model", model_id(m)}, {"spec", baseline_spec.to_json()}, {"result", result_json(baseline, a.trajectory)}});
    return kOk;
  }
  const auto policy = run(m, policy_spec, &h);
  const auto comparison = compare(baseline, policy, targets);
  emit(ctx, comparison.to_csv(),
       {{"model", model_id(m)},
        {"baseline_spec", baseline_spec.to_json()},
        {"spec", policy_spec.to_json()},
        {"baseline", result_json(baseline, a.trajectory)},
        {"policy", result_json(policy, a.trajectory)},
        {"comparison", comparison.to_json()}});
  return kOk;
}

struct CompareArgs {
  std::string model;
  std::optional<std::string> format;
  std::string baseline;
  std::string policy;
  std::string targets;
};

int cmd_compare(Context& ctx, const CompareArgs& a) {
  const auto m = load_model_file(a.model, a.format);
  const auto h = config_hierarchy(ctx.config);
  const auto load_spec = [&](const std::string& path) {
    ScenarioFlags flags;
    flags.spec_file = path;
    return ctx.config.resolve_presets(flags.build(ctx.config), m, h);
  };
  const auto base_spec = load_spec(a.baseline);
  const auto policy_spec = load_spec(a.policy);
  base_spec.validate_for(m);
  policy_spec.validate_for(m);
  const auto baseline = run(m, base_spec, &h);
  const auto policy = run(m, policy_spec, &h);
  const auto comparison = compare(baseline, policy, parse_ids(a.targets));
  emit(ctx, comparison.to_csv(), {{"model", model_id(m)}, {"comparison", comparison.to_json()}});
  return kOk;
}

struct DrillArgs {
  std::string manifest;
  std::string parent;
  double clamp_value = 1.0;
  bool trajectory = false;
  ScenarioFlags scenario;
};

/// The scenario template with custom presets expanded against the social
/// map the drill runs on.
ScenarioSpec drill_template(const Context& ctx, const Corpus& corpus, const std::string& parent,
                            const ScenarioSpec& spec) {
  const auto& h = corpus.hierarchy();
  if (!h.contains(parent) || h.level_of(parent) == Level::variables) return spec;
  const Level level = h.level_of(parent) == Level::concepts ? Level::key_variables : Level::variables;
  return ctx.config.resolve_presets(spec, corpus.social(level), h);
}

int cmd_drill(Context& ctx, const DrillArgs& a) {
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  const auto spec = a.scenario.build(ctx.config);
  const auto corpus = Corpus::load(manifest, ctx.config.pipeline());
  const auto batch = drill_down(corpus, a.parent, drill_template(ctx, corpus, a.parent, spec), a.clamp_value);
  warn_all(ctx, batch.warnings);
  std::string text = "clamped,id,baseline,policy,delta\n";
  for (const auto& s : batch.scenarios) {
    for (const auto& n : s.comparison.nodes) {
      text += s.node_id + "," + n.id + "," + format_double(n.baseline) + "," + format_double(n.policy) + "," +
              format_double(n.delta) + "\n";
    }
  }
  emit(ctx, text, batch.to_json(a.trajectory));
  return kOk;
}

struct RankArgs {
  std::string manifest;
  std::string parent;
  std::string weights;
  std::string targets_file;
  ScenarioFlags scenario;
};

int cmd_rank(Context& ctx, const RankArgs& a) {
  if (!a.weights.empty()) ctx.config.criterion_weights = parse_criterion_weights(a.weights);
  ctx.config.validate();
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  const auto spec = a.scenario.build(ctx.config);
  std::optional<TargetSets> targets;
  if (!a.targets_file.empty()) targets = TargetSets::from_json(read_json_file(a.targets_file, "target sets"));
  const auto corpus = Corpus::load(manifest, ctx.config.pipeline());
  const auto result = rank_children(corpus, a.parent, drill_template(ctx, corpus, a.parent, spec),
                                    ctx.config.criterion_weights, targets);
  warn_all(ctx, result.batch.warnings);
  emit(ctx, result.report.to_csv(), result.to_json());
  return kOk;
}

struct ServeArgs {
  std::string manifest;
  std::string host = "127.0.0.1";
  int port = 8080;
};

std::atomic<service::Server*> g_server{nullptr};

extern "C" void stop_server(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(Context& ctx, const ServeArgs& a) {
  const auto manifest = ctx.config.load_manifest(require_manifest(ctx, a.manifest));
  auto corpus = std::make_shared<const Corpus>(Corpus::load(manifest, ctx.config.pipeline()));
  warn_all(ctx, corpus->warnings());
  service::ServiceOptions options;
  options.criterion_weights = ctx.config.criterion_weights;
  options.scenario_defaults = ctx.config.scenario;
  options.threads = ctx.config.threads;
  service::Service svc(std::move(corpus), options);
  service::Server server(svc);
  const int port = server.bind(a.host, a.port);
  ctx.out << "listening on http://" << a.host << ":" << port << "/api/v1\n" << std::flush;
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy cognitive map toolkit: convert, analyze, condense, aggregate, simulate and rank", "fcm"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  bool json = false;
  std::string out_file;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  app.add_flag("--json", json, "Machine-readable JSON report");
  auto* out_opt = app.add_option("-o,--out", out_file, "Output file (reports) or directory (artifacts)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads, 0 = all cores");
  std::string hierarchy;
  auto* hierarchy_opt = app.add_option("--hierarchy", hierarchy, "Hierarchy JSON overriding the manifest's")
                            ->check(CLI::ExistingFile);

  GenCorpusArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate a synthetic stakeholder corpus");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--maps", gen.maps, "Number of stakeholder maps");
  gen_cmd->add_option("--sizes", gen.sizes, "Node counts per level, e.g. 186,42,13");
  gen_cmd->add_option("--edges", gen.edges, "Social-map edge counts per level, 0 = derived");
  gen_cmd->add_option("--share", gen.share, "Chance an edge appears in each other map");
  gen_cmd->add_option("--dissent", gen.dissent, "Chance a stakeholder flips an edge sign");

  ConvertArgs conv;
  auto* conv_cmd = app.add_subcommand("convert", "Normalize every map of a corpus to one format");
  conv_cmd->add_option("manifest", conv.manifest, "Corpus manifest");
  conv_cmd->add_option("--format", conv.format, "Output cell format (default beta)");

  CondenseArgs cond;
  auto* cond_cmd = app.add_subcommand("condense", "Condense every map of one level to the level above");
  cond_cmd->add_option("manifest", cond.manifest, "Corpus manifest");
  cond_cmd->add_option("--level", cond.level, "Level to condense (default: lowest present)");

  AggregateArgs agg;
  auto* agg_cmd = app.add_subcommand("aggregate", "Build group and social maps of one level");
  agg_cmd->add_option("manifest", agg.manifest, "Corpus manifest");
  agg_cmd->add_option("--level", agg.level, "Level to aggregate (default: lowest present)");
  agg_cmd->add_option("--group", agg.group, "One stakeholder group");
  agg_cmd->add_flag("--all", agg.all, "Every group plus the social map");

  AnalyzeArgs ana;
  auto* ana_cmd = app.add_subcommand("analyze", "Centrality report of one map");
  ana_cmd->add_option("model", ana.model, "Map CSV (with sidecar) or model JSON")->required();
  ana_cmd->add_option("--format", ana.format, "Cell format when there is no sidecar");
  ana_cmd->add_option("--weights", ana.weights, "Prioritization weights degree,closeness,betweenness");
  ana_cmd->add_option("--edge-length", ana.edge_length, "Path length of an edge: inverse or magnitude");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a map to steady state, optionally with clamps");
  sim_cmd->add_option("model", sim.model, "Map CSV (with sidecar) or model JSON")->required();
  sim_cmd->add_option("--format", sim.format, "Cell format when there is no sidecar");
  sim_cmd->add_option("--targets", sim.targets, "Comma-separated target node ids");
  sim_cmd->add_flag("--trajectory", sim.trajectory, "Include trajectories in JSON output");
  sim.scenario.attach(sim_cmd, true);

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Steady-state deltas between two scenarios of one map");
  cmp_cmd->add_option("model", cmp.model, "Map CSV (with sidecar) or model JSON")->required();
  cmp_cmd->add_option("--format", cmp.format, "Cell format when there is no sidecar");
  cmp_cmd->add_option("--baseline", cmp.baseline, "Baseline scenario JSON")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--policy", cmp.policy, "Policy scenario JSON")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--targets", cmp.targets, "Comma-separated target node ids");

  DrillArgs drl;
  auto* drl_cmd = app.add_subcommand("drill", "Clamp each child of a node in turn on the social map below it");
  drl_cmd->add_option("manifest", drl.manifest, "Corpus manifest");
  drl_cmd->add_option("--parent,--concept", drl.parent, "Concept or key variable to drill into")->required();
  drl_cmd->add_option("--clamp-value", drl.clamp_value, "Value the children are clamped to");
  drl_cmd->add_flag("--trajectory", drl.trajectory, "Include trajectories in JSON output");
  drl.scenario.attach(drl_cmd, false);

  RankArgs rnk;
  auto* rnk_cmd = app.add_subcommand("rank", "Appropriateness ranking of a node's children");
  rnk_cmd->add_option("manifest", rnk.manifest, "Corpus manifest");
  rnk_cmd->add_option("--concept,--parent", rnk.parent, "Concept or key variable whose children are ranked")
      ->required();
  rnk_cmd->add_option("--weights", rnk.weights, "Criterion weights importance,feasibility,influence");
  rnk_cmd->add_option("--targets", rnk.targets_file, "Target sets JSON")->check(CLI::ExistingFile);
  rnk.scenario.attach(rnk_cmd, false);

  ServeArgs srv;
  auto* srv_cmd = app.add_subcommand("serve", "Serve a corpus over HTTP under /api/v1");
  srv_cmd->add_option("manifest", srv.manifest, "Corpus manifest");
  srv_cmd->add_option("--host", srv.host, "Bind address");
  srv_cmd->add_option("--port", srv.port, "Port, 0 = any free port");

  auto* show_cmd = app.add_subcommand("show-config", "Print the effective configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Context ctx{out, err, {}, json, std::nullopt};
    if (!config_path.empty()) ctx.config.load_file(config_path);
    if (threads_opt->count()) ctx.config.threads = threads;
    if (hierarchy_opt->count()) ctx.config.hierarchy = fs::path(hierarchy);
    if (out_opt->count()) ctx.out_file = fs::path(out_file);
    ctx.config.validate();

    // artifact commands take --out as a directory
    const auto out_dir = [&] { return ctx.out_file ? ctx.out_file->string() : std::string(); };
    if (gen_cmd->parsed()) {
      gen.out = out_dir();
      return cmd_gen_corpus(ctx, gen);
    }
    if (conv_cmd->parsed()) {
      conv.out = out_dir();
      return cmd_convert(ctx, conv);
    }
    if (cond_cmd->parsed()) {
      cond.out = out_dir();
      return cmd_condense(ctx, cond);
    }
    if (agg_cmd->parsed()) {
      agg.out = out_dir();
      return cmd_aggregate(ctx, agg);
    }
    if (ana_cmd->parsed()) return cmd_analyze(ctx, ana);
    if (sim_cmd->parsed()) return cmd_simulate(ctx, sim);
    if (cmp_cmd->parsed()) return cmd_compare(ctx, cmp);
    if (drl_cmd->parsed()) return cmd_drill(ctx, drl);
    if (rnk_cmd->parsed()) return cmd_rank(ctx, rnk);
    if (srv_cmd->parsed()) return cmd_serve(ctx, srv);
    if (show_cmd->parsed()) {
      ctx.out_file.reset();
      out << ctx.config.to_json().dump(2) << "\n";
      return kOk;
    }
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace fcm::cli
