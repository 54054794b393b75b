// Python bindings for the fcmkit core. Structured results (reports,
// simulations, comparisons) cross the boundary as JSON text and are decoded
// into plain dicts by the package's __init__; models and hierarchies are
// exposed as objects.

#include <pybind11/gil_safe_call_once.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcm/aggregation.hpp"
#include "fcm/appropriateness.hpp"
#include "fcm/centrality.hpp"
#include "fcm/condensation.hpp"
#include "fcm/corpus_gen.hpp"
#include "fcm/errors.hpp"
#include "fcm/hierarchy.hpp"
#include "fcm/linguistic.hpp"
#include "fcm/model.hpp"
#include "fcm/model_io.hpp"
#include "fcm/pipeline.hpp"
#include "fcm/simulation.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json parse_arg(const std::string& text, const char* what) {
  if (text.empty()) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fcm::fail(fcm::ErrorKind::parse, std::string("malformed ") + what + ": " + e.what());
  }
}

fcm::ScenarioSpec spec_from(const std::string& text) {
  try {
    return fcm::ScenarioSpec::from_json(parse_arg(text, "scenario"));
  } catch (const json::exception& e) {
    fcm::fail(fcm::ErrorKind::configuration, std::string("invalid scenario: ") + e.what());
  }
}

fcm::CentralityOptions centrality_options(const std::vector<double>& weights, const std::string& edge_length) {
  if (weights.size() != 3) fcm::fail(fcm::ErrorKind::configuration, "weights must have three entries");
  fcm::CentralityOptions options;
  options.weights = {weights[0], weights[1], weights[2]};
  options.weights.validate();
  options.edge_length = fcm::parse_edge_length(edge_length);
  return options;
}

fcm::CriterionWeights criterion_weights(const std::vector<double>& weights) {
  if (weights.size() != 3) fcm::fail(fcm::ErrorKind::configuration, "criterion weights must have three entries");
  fcm::CriterionWeights w{weights[0], weights[1], weights[2]};
  w.validate();
  return w;
}

std::vector<const fcm::FcmModel*> pointers(const std::vector<const fcm::FcmModel*>& maps) {
  for (const auto* m : maps) {
    if (m == nullptr) fcm::fail(fcm::ErrorKind::usage, "maps must not contain None");
  }
  return maps;
}

fcm::FcmModel model_from_matrix(const std::vector<std::string>& ids,
                                const py::array_t<double, py::array::c_style | py::array::forcecast>& weights,
                                const std::string& level, const std::string& stakeholder,
                                const std::string& group) {
  const auto n = ids.size();
  if (weights.ndim() != 2 || static_cast<std::size_t>(weights.shape(0)) != n ||
      static_cast<std::size_t>(weights.shape(1)) != n) {
    fcm::fail(fcm::ErrorKind::shape, "weights must be an n x n matrix matching ids");
  }
  const auto lvl = fcm::parse_level(level);
  std::vector<fcm::ConceptNode> nodes;
  nodes.reserve(n);
  for (const auto& id : ids) {
    fcm::ConceptNode node;
    node.id = id;
    node.label = id;
    node.level = lvl;
    nodes.push_back(std::move(node));
  }
  fcm::WeightMatrix w(n);
  const auto view = weights.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w(i, j) = view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
  }
  fcm::Provenance p;
  p.stakeholder_id = stakeholder;
  p.group_id = group;
  p.level = lvl;
  return fcm::FcmModel(std::move(nodes), std::move(w), std::move(p));
}

py::array_t<double> weights_array(const fcm::FcmModel& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  py::array_t<double> out({n, n});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    for (py::ssize_t j = 0; j < n; ++j) view(i, j) = m.weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fuzzy cognitive map toolkit: 2-tuple conversion, centrality, condensation, aggregation, "
            "simulation and policy ranking.";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [] { return py::reinterpret_steal<py::object>(PyErr_NewException("fcmkit.FcmError", PyExc_ValueError, nullptr)); });
  m.attr("FcmError") = error_type.get_stored();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const fcm::Error& e) {
      const auto& type = error_type.get_stored();
      py::object err = type(e.what());
      err.attr("kind") = std::string(fcm::to_string(e.kind()));
      PyErr_SetObject(type.ptr(), err.ptr());
    }
  });

  // --- 2-tuple linguistic representation (basic set, g = 6) ---
  m.def("tuple_from_beta", [](double beta) {
        const auto t = fcm::tuple_from_beta(fcm::Beta{beta});
        return py::make_tuple(t.term, t.alpha);
      }, py::arg("beta"), "Nearest-term 2-tuple (term, alpha) of a beta value in [-6, 6].");
  m.def("beta_from_tuple", [](int term, double alpha) { return fcm::beta_from_tuple({term, alpha}).value; },
        py::arg("term"), py::arg("alpha") = 0.0);
  m.def("term_label", [](int term) { return fcm::base_term_set().label(term); }, py::arg("term"));
  m.def("normalize_numeric", [](double value, const std::string& scale) {
        if (scale != "unit" && scale != "ten") fcm::fail(fcm::ErrorKind::configuration, "scale must be 'unit' or 'ten'");
        return fcm::normalize_to_blts(value, scale == "unit" ? fcm::NumericScale::unit : fcm::NumericScale::ten).value;
      }, py::arg("value"), py::arg("scale") = "unit", "Numeric weight ([-1,1] or [-10,10]) to beta.");
  m.def("defuzzify", [](double beta) { return fcm::defuzzify(fcm::Beta{beta}); }, py::arg("beta"),
        "Crisp value in [0, 1] of a beta value.");

  // --- hierarchy ---
  py::class_<fcm::CondensationHierarchy>(m, "Hierarchy")
      .def_static("water_scarcity", []() { return fcm::CondensationHierarchy::water_scarcity(); },
                  "The bundled three-level hierarchy.")
      .def_static("load", &fcm::CondensationHierarchy::load, py::arg("path"))
      .def_static("from_json", [](const std::string& text) {
        return fcm::CondensationHierarchy::from_json(parse_arg(text, "hierarchy"));
      }, py::arg("text"))
      .def("to_json", [](const fcm::CondensationHierarchy& h) { return h.to_json().dump(); })
      .def("ids_at", [](const fcm::CondensationHierarchy& h, const std::string& level) {
        return h.ids_at(fcm::parse_level(level));
      }, py::arg("level"))
      .def("children", &fcm::CondensationHierarchy::children_of, py::arg("id"))
      .def("parent", &fcm::CondensationHierarchy::parent_of, py::arg("id"))
      .def("ancestor_at", [](const fcm::CondensationHierarchy& h, const std::string& id, const std::string& level) {
        return h.ancestor_at(id, fcm::parse_level(level));
      }, py::arg("id"), py::arg("level"))
      .def("__contains__", &fcm::CondensationHierarchy::contains);

  // --- models ---
  py::class_<fcm::FcmModel>(m, "Model")
      .def(py::init(&model_from_matrix), py::arg("ids"), py::arg("weights"), py::arg("level") = "variables",
           py::arg("stakeholder") = "", py::arg("group") = "",
           "A map from node ids and a matrix of beta weights in [-6, 6] (row = cause, column = effect).")
      .def_static("load", [](const std::filesystem::path& path, const std::optional<std::string>& format) {
        fcm::LoadOptions options;
        if (format) options.source_format = fcm::parse_source_format(*format);
        return fcm::load_fcm(path, options);
      }, py::arg("path"), py::arg("format") = py::none(),
                  "Read a CSV matrix (and its JSON sidecar, when present).")
      .def_static("from_csv", [](const std::string& text, const std::string& format) {
        return fcm::parse_fcm_csv(text, fcm::parse_source_format(format), nullptr);
      }, py::arg("text"), py::arg("format") = "beta")
      .def_static("from_json", [](const std::string& text) { return fcm::model_from_json(parse_arg(text, "model")); },
                  py::arg("text"))
      .def("to_json", [](const fcm::FcmModel& self) { return fcm::model_json(self).dump(); })
      .def("to_csv", [](const fcm::FcmModel& self, const std::string& format) {
        return fcm::format_fcm_csv(self, fcm::parse_source_format(format));
      }, py::arg("format") = "beta")
      .def("save", [](const fcm::FcmModel& self, const std::filesystem::path& path, const std::string& format) {
        fcm::save_fcm(self, path, fcm::parse_source_format(format));
      }, py::arg("path"), py::arg("format") = "beta")
      .def_property_readonly("ids", &fcm::FcmModel::ids)
      .def_property_readonly("weights", &weights_array, "Copy of the beta weight matrix.")
      .def_property_readonly("level", [](const fcm::FcmModel& self) { return std::string(fcm::to_string(self.level())); })
      .def_property_readonly("stakeholder", [](const fcm::FcmModel& self) { return self.provenance().stakeholder_id; })
      .def_property_readonly("group", [](const fcm::FcmModel& self) { return self.provenance().group_id; })
      .def_property_readonly("mentions", [](const fcm::FcmModel& self) {
        std::vector<int> out;
        for (const auto& n : self.nodes()) out.push_back(n.mention_count);
        return out;
      })
      .def_property_readonly("edge_count", &fcm::FcmModel::edge_count)
      .def_property_readonly("density", [](const fcm::FcmModel& self) { return fcm::density(self); })
      .def("weight", [](const fcm::FcmModel& self, const std::string& from, const std::string& to) {
        return self.weight(self.index_of(from), self.index_of(to));
      }, py::arg("source"), py::arg("target"))
      .def("__len__", &fcm::FcmModel::size)
      .def("__eq__", [](const fcm::FcmModel& a, const fcm::FcmModel& b) { return a == b; })
      .def("__repr__", [](const fcm::FcmModel& self) {
        return "<Model " + fcm::model_id(self) + " nodes=" + std::to_string(self.size()) +
               " edges=" + std::to_string(self.edge_count()) + ">";
      });

  // --- centrality, condensation, aggregation ---
  m.def("_centrality", [](const fcm::FcmModel& model, const std::vector<double>& weights, const std::string& edge_length) {
        return fcm::analyze_centrality(model, centrality_options(weights, edge_length)).to_json().dump();
      }, py::arg("model"), py::arg("weights"), py::arg("edge_length"));
  m.def("condense", [](const fcm::FcmModel& model, const fcm::CondensationHierarchy* h,
                       const std::vector<double>& weights, const std::string& edge_length) {
        const auto& hierarchy = h ? *h : fcm::CondensationHierarchy::water_scarcity();
        return fcm::condense(model, hierarchy, centrality_options(weights, edge_length));
      }, py::arg("model"), py::arg("hierarchy") = nullptr, py::arg("weights") = std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3},
        py::arg("edge_length") = "inverse",
        "Condense a map one level up the hierarchy, weighting nodes by their credibility.");
  m.def("_aggregate", [](const std::vector<const fcm::FcmModel*>& maps, const std::optional<std::vector<double>>& cw,
                         const std::string& stakeholder, const std::string& kind) {
        const auto ptrs = pointers(maps);
        fcm::AggregateOptions options;
        options.stakeholder_id = stakeholder;
        options.kind = kind;
        auto result = cw ? fcm::aggregate(std::span<const fcm::FcmModel* const>(ptrs), *cw, options)
                         : fcm::aggregate_by_credibility(ptrs, {}, options);
        return py::make_tuple(std::move(result.model), result.warnings);
      }, py::arg("maps"), py::arg("cw"), py::arg("stakeholder"), py::arg("kind"));

  // --- simulation ---
  m.def("_simulate", [](const fcm::FcmModel& model, const std::string& spec, const fcm::CondensationHierarchy* h) {
        const auto s = spec_from(spec);
        py::gil_scoped_release release;
        return fcm::run(model, s, h).to_json().dump();
      }, py::arg("model"), py::arg("spec"), py::arg("hierarchy") = nullptr);
  m.def("_compare", [](const fcm::FcmModel& model, const std::string& baseline, const std::string& policy,
                       const std::vector<std::string>& targets, const fcm::CondensationHierarchy* h) {
        const auto b = spec_from(baseline);
        const auto p = spec_from(policy);
        py::gil_scoped_release release;
        return fcm::compare(fcm::run(model, b, h), fcm::run(model, p, h), targets).to_json().dump();
      }, py::arg("model"), py::arg("baseline"), py::arg("policy"), py::arg("targets"), py::arg("hierarchy") = nullptr);
  m.def("preset_names", &fcm::preset_names);

  // --- corpus pipeline ---
  py::class_<fcm::Corpus, std::shared_ptr<fcm::Corpus>>(m, "Corpus")
      .def_static("load", [](const std::filesystem::path& manifest, unsigned threads, bool social_from_groups,
                             const std::vector<double>& weights) {
        fcm::PipelineOptions options;
        options.threads = threads;
        options.social_from_groups = social_from_groups;
        options.centrality = centrality_options(weights, "inverse");
        py::gil_scoped_release release;
        return std::make_shared<fcm::Corpus>(fcm::Corpus::load(manifest, options));
      }, py::arg("manifest"), py::arg("threads") = 0, py::arg("social_from_groups") = false,
                  py::arg("weights") = std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3},
                  "Load every map of a manifest and build group and social maps at each level.")
      .def_property_readonly("model_ids", &fcm::Corpus::model_ids)
      .def_property_readonly("warnings", &fcm::Corpus::warnings)
      .def_property_readonly("hierarchy", &fcm::Corpus::hierarchy, py::return_value_policy::reference_internal)
      .def("model", &fcm::Corpus::model, py::arg("id"), py::return_value_policy::reference_internal)
      .def("social", [](const fcm::Corpus& self, const std::string& level) -> const fcm::FcmModel& {
        return self.social(fcm::parse_level(level));
      }, py::arg("level"), py::return_value_policy::reference_internal)
      .def("_drill", [](const fcm::Corpus& self, const std::string& parent, const std::string& spec, double clamp_value,
                        bool trajectories) {
        const auto s = spec_from(spec);
        py::gil_scoped_release release;
        return fcm::drill_down(self, parent, s, clamp_value).to_json(trajectories).dump();
      }, py::arg("parent"), py::arg("spec"), py::arg("clamp_value"), py::arg("trajectories"))
      .def("_rank", [](const fcm::Corpus& self, const std::string& parent, const std::string& spec,
                       const std::vector<double>& weights, const std::string& targets) {
        const auto s = spec_from(spec);
        const auto w = criterion_weights(weights);
        std::optional<fcm::TargetSets> t;
        if (!targets.empty()) t = fcm::TargetSets::from_json(parse_arg(targets, "targets"));
        py::gil_scoped_release release;
        return fcm::rank_children(self, parent, s, w, t).to_json().dump();
      }, py::arg("parent"), py::arg("spec"), py::arg("weights"), py::arg("targets"));

  m.def("generate_corpus", [](const std::filesystem::path& dir, std::uint64_t seed, std::size_t n_maps) {
        fcm::CorpusSpec spec;
        spec.seed = seed;
        spec.n_maps = n_maps;
        py::gil_scoped_release release;
        return fcm::generate_synthetic_corpus(spec, dir);
      }, py::arg("directory"), py::arg("seed") = 1, py::arg("maps") = 35,
        "Write a synthetic stakeholder corpus and return its manifest path.");
}
