#include "fcm/model_io.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"
#include "fcm/util.hpp"

namespace fcm {

namespace fs = std::filesystem;

namespace {

std::string strip_quotes(std::string cell) {
  if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') return cell.substr(1, cell.size() - 2);
  return cell;
}

const LinguisticTermSet& canonical_set(SourceFormat format) {
  return format == SourceFormat::linguistic_11 ? eleven_term_set() : base_term_set();
}

bool same_geometry(const LinguisticTermSet& a, const LinguisticTermSet& b) {
  if (a.half_width() != b.half_width()) return false;
  if (a.domain().lo != b.domain().lo || a.domain().hi != b.domain().hi) return false;
  for (int i = -a.half_width(); i <= a.half_width(); ++i) {
    const auto& l = a.triangle(i);
    const auto& r = b.triangle(i);
    if (l.a != r.a || l.b != r.b || l.c != r.c) return false;
  }
  return true;
}

// Convert one CSV cell to beta. Empty cells and a literal 0 are "no edge" in
// every format.
double cell_to_beta(const std::string& cell, SourceFormat format, const LinguisticTermSet& labels,
                    std::size_t row, std::size_t column) {
  if (cell.empty()) return 0.0;
  switch (format) {
    case SourceFormat::numeric_1:
    case SourceFormat::numeric_10:
    case SourceFormat::beta: {
      const auto value = parse_double(cell);
      if (!value) throw ParseError(row, column, "'" + cell + "' is not a number");
      const double bound = format == SourceFormat::numeric_1 ? 1.0 : format == SourceFormat::numeric_10 ? 10.0 : kMaxBeta;
      if (std::abs(*value) > bound) {
        throw ParseError(row, column, "value " + cell + " outside [-" + format_double(bound) + ", " +
                                          format_double(bound) + "] for " + std::string(to_string(format)));
      }
      if (format == SourceFormat::beta) return *value;
      return normalize_to_blts(*value, format == SourceFormat::numeric_1 ? NumericScale::unit : NumericScale::ten)
          .value;
    }
    case SourceFormat::linguistic_13:
    case SourceFormat::linguistic_11: {
      if (cell == "0") return 0.0;
      int term = 0;
      try {
        term = labels.index_of(cell);
      } catch (const Error&) {
        throw ParseError(row, column, "'" + cell + "' is not a label of the " +
                                          std::string(to_string(format)) + " term set");
      }
      return normalize_to_blts(tuple_from_term(term, labels), canonical_set(format)).value;
    }
  }
  return 0.0;
}

std::string beta_to_cell(double beta, SourceFormat format) {
  switch (format) {
    case SourceFormat::beta: return format_double(beta);
    case SourceFormat::numeric_1: return format_double(beta / kMaxBeta);
    case SourceFormat::numeric_10: return format_double(beta * 10.0 / kMaxBeta);
    case SourceFormat::linguistic_13: {
      if (beta == 0.0) return "0";
      return base_term_set().label(tuple_from_beta(Beta{beta}).term);
    }
    case SourceFormat::linguistic_11: {
      if (beta == 0.0) return "0";
      const auto& eleven = eleven_term_set();
      const int g = eleven.half_width();
      const double position = beta / kMaxBeta * g;
      return eleven.label(static_cast<int>(std::round(position)));
    }
  }
  return format_double(beta);
}

Level level_from_doc(const nlohmann::json& doc, const char* key, Level fallback) {
  if (!doc.contains(key)) return fallback;
  return parse_level(doc.at(key).get<std::string>());
}

}  // namespace

// ---------------------------------------------------------------- manifest

CorpusManifest CorpusManifest::from_json(const nlohmann::json& doc, fs::path base_dir) {
  CorpusManifest manifest;
  manifest.base_dir = std::move(base_dir);
  try {
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      entry.stakeholder_id = e.at("stakeholder_id").get<std::string>();
      entry.group_id = e.value("group_id", std::string{});
      entry.level = level_from_doc(e, "level", Level::variables);
      entry.source_format = parse_source_format(e.value("source_format", std::string("beta")));
      if (e.contains("term_set")) entry.term_set = e.at("term_set").get<std::string>();
      manifest.entries.push_back(std::move(entry));
    }
    if (doc.contains("hierarchy")) manifest.hierarchy = doc.at("hierarchy").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::configuration, std::string("invalid manifest: ") + e.what());
  }
  manifest.validate();
  return manifest;
}

CorpusManifest CorpusManifest::load(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, "malformed manifest " + path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path());
}

nlohmann::json CorpusManifest::to_json() const {
  nlohmann::json entries_doc = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json item = {{"path", e.path.generic_string()},
                           {"stakeholder_id", e.stakeholder_id},
                           {"group_id", e.group_id},
                           {"level", to_string(e.level)},
                           {"source_format", to_string(e.source_format)}};
    if (e.term_set) item["term_set"] = e.term_set->generic_string();
    entries_doc.push_back(std::move(item));
  }
  nlohmann::json doc = {{"entries", std::move(entries_doc)}};
  if (hierarchy) doc["hierarchy"] = hierarchy->generic_string();
  return doc;
}

void CorpusManifest::validate() const {
  std::set<std::string> paths;
  for (const auto& e : entries) {
    if (!paths.insert(e.path.lexically_normal().generic_string()).second) {
      fail(ErrorKind::configuration, "manifest lists " + e.path.string() + " twice");
    }
    if (e.stakeholder_id.empty()) fail(ErrorKind::configuration, "manifest entry " + e.path.string() + " has no stakeholder id");
    if (!is_known_group(e.group_id)) {
      fail(ErrorKind::configuration, "manifest entry " + e.path.string() + " has unknown group '" + e.group_id + "'");
    }
  }
}

fs::path CorpusManifest::resolve(const fs::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

// ---------------------------------------------------------------- JSON forms

nlohmann::json provenance_json(const Provenance& p) {
  return {{"stakeholder_id", p.stakeholder_id},
          {"group_id", p.group_id},
          {"level", to_string(p.level)},
          {"source_format", to_string(p.source_format)},
          {"kind", p.kind},
          {"contributors", p.contributors},
          {"source_map", p.source_map}};
}

Provenance provenance_from_json(const nlohmann::json& doc) {
  Provenance p;
  p.stakeholder_id = doc.value("stakeholder_id", std::string{});
  p.group_id = doc.value("group_id", std::string{});
  p.level = level_from_doc(doc, "level", Level::variables);
  p.source_format = parse_source_format(doc.value("source_format", std::string("beta")));
  p.kind = doc.value("kind", std::string("individual"));
  p.contributors = doc.value("contributors", std::vector<std::string>{});
  p.source_map = doc.value("source_map", std::string{});
  return p;
}

nlohmann::json node_json(const ConceptNode& node) {
  nlohmann::json doc = {{"id", node.id}, {"label", node.label}, {"level", to_string(node.level)}};
  if (node.parent_group) doc["parent_group"] = *node.parent_group;
  return doc;
}

ConceptNode node_from_json(const nlohmann::json& doc, Level fallback_level) {
  ConceptNode node;
  node.id = doc.at("id").get<std::string>();
  node.label = doc.value("label", node.id);
  node.level = level_from_doc(doc, "level", fallback_level);
  node.mention_count = doc.value("mention_count", 0);
  if (doc.contains("parent_group") && !doc.at("parent_group").is_null()) {
    node.parent_group = doc.at("parent_group").get<std::string>();
  }
  return node;
}

nlohmann::json model_json(const FcmModel& model) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : model.nodes()) {
    auto doc = node_json(n);
    doc["mention_count"] = n.mention_count;
    nodes.push_back(std::move(doc));
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto row = model.weights().row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"nodes", std::move(nodes)}, {"weights", std::move(rows)}, {"provenance", provenance_json(model.provenance())}};
}

FcmModel model_from_json(const nlohmann::json& doc) {
  try {
    auto provenance = provenance_from_json(doc.value("provenance", nlohmann::json::object()));
    std::vector<ConceptNode> nodes;
    for (const auto& n : doc.at("nodes")) nodes.push_back(node_from_json(n, provenance.level));
    const auto& rows = doc.at("weights");
    if (rows.size() != nodes.size()) fail(ErrorKind::shape, "weights must have one row per node");
    WeightMatrix w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& row = rows.at(i);
      if (row.size() != nodes.size()) fail(ErrorKind::shape, "weight row " + std::to_string(i) + " has wrong length");
      for (std::size_t j = 0; j < nodes.size(); ++j) w(i, j) = row.at(j).get<double>();
    }
    return FcmModel(std::move(nodes), std::move(w), std::move(provenance));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("invalid model document: ") + e.what());
  }
}

// ---------------------------------------------------------------- CSV

fs::path sidecar_path(const fs::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

FcmModel parse_fcm_csv(std::string_view text, SourceFormat format, const nlohmann::json* sidecar,
                       const LinguisticTermSet* term_set) {
  const LinguisticTermSet& labels = term_set ? *term_set : canonical_set(format);
  if (term_set && (format == SourceFormat::linguistic_13 || format == SourceFormat::linguistic_11) &&
      !same_geometry(*term_set, canonical_set(format))) {
    fail(ErrorKind::configuration, "bound term set does not match the geometry of " + std::string(to_string(format)));
  }

  std::vector<std::vector<std::string>> rows;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    for (auto& c : cells) c = strip_quotes(trim(c));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) fail(ErrorKind::shape, "matrix file is empty");

  const auto& header = rows.front();
  const std::size_t n = header.size() - 1;
  std::vector<std::string> ids(header.begin() + 1, header.end());
  if (rows.size() - 1 != n) {
    fail(ErrorKind::shape, "matrix has " + std::to_string(n) + " columns but " + std::to_string(rows.size() - 1) + " rows");
  }
  WeightMatrix w(n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != n + 1) {
      fail(ErrorKind::shape, "row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(n + 1));
    }
    if (cells[0] != ids[r - 1]) {
      throw ParseError(r + 1, 1, "row id '" + cells[0] + "' does not match column id '" + ids[r - 1] + "'");
    }
    for (std::size_t c = 1; c <= n; ++c) {
      const double beta = cell_to_beta(cells[c], format, labels, r + 1, c + 1);
      if (r - 1 == c - 1 && beta != 0.0) {
        fail(ErrorKind::validation, "self-loop on node '" + ids[r - 1] + "' (row " + std::to_string(r + 1) + ")");
      }
      w(r - 1, c - 1) = beta;
    }
  }

  Provenance provenance;
  provenance.source_format = format;
  std::vector<ConceptNode> nodes;
  if (sidecar) {
    if (sidecar->contains("provenance")) provenance = provenance_from_json(sidecar->at("provenance"));
    if (sidecar->contains("nodes")) {
      const auto& docs = sidecar->at("nodes");
      if (docs.size() != n) fail(ErrorKind::consistency, "sidecar lists " + std::to_string(docs.size()) + " nodes, matrix has " + std::to_string(n));
      for (std::size_t i = 0; i < n; ++i) {
        auto node = node_from_json(docs.at(i), provenance.level);
        if (node.id != ids[i]) {
          fail(ErrorKind::consistency, "sidecar node " + std::to_string(i) + " is '" + node.id + "', matrix says '" + ids[i] + "'");
        }
        nodes.push_back(std::move(node));
      }
    }
  }
  if (nodes.empty()) {
    for (const auto& id : ids) nodes.push_back({id, id, provenance.level, 0, std::nullopt});
  }
  for (auto& node : nodes) node.mention_count = 0;  // derived from the corpus, never stored
  return FcmModel(std::move(nodes), std::move(w), std::move(provenance));
}

FcmModel load_fcm(const fs::path& path, const LoadOptions& options) {
  const auto text = read_text_file(path);
  nlohmann::json sidecar;
  const auto side = sidecar_path(path);
  const bool has_sidecar = fs::exists(side);
  if (has_sidecar) {
    try {
      sidecar = nlohmann::json::parse(read_text_file(side));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse, "malformed sidecar " + side.string() + ": " + e.what());
    }
  }

  std::optional<SourceFormat> format = options.source_format;
  if (!format && options.entry) format = options.entry->source_format;
  if (!format && has_sidecar && sidecar.contains("format")) format = parse_source_format(sidecar.at("format").get<std::string>());
  if (!format && has_sidecar && sidecar.contains("provenance") && sidecar.at("provenance").contains("source_format")) {
    format = parse_source_format(sidecar.at("provenance").at("source_format").get<std::string>());
  }
  if (!format) fail(ErrorKind::configuration, "no source format declared for " + path.string());

  auto model = parse_fcm_csv(text, *format, has_sidecar ? &sidecar : nullptr,
                             options.term_set ? &*options.term_set : nullptr);
  if (!has_sidecar || !sidecar.contains("provenance")) {
    auto p = model.provenance();
    p.stakeholder_id = path.stem().string();
    model = model.with_provenance(std::move(p));
  }
  if (options.entry) {
    auto p = model.provenance();
    p.stakeholder_id = options.entry->stakeholder_id;
    p.group_id = options.entry->group_id;
    p.level = options.entry->level;
    if (p.source_format == SourceFormat::beta && options.entry->source_format != SourceFormat::beta) {
      p.source_format = options.entry->source_format;
    }
    auto nodes = model.nodes();
    for (auto& node : nodes) node.level = p.level;
    model = FcmModel(std::move(nodes), model.weights(), std::move(p));
  }
  return model;
}

FcmModel load_fcm(const CorpusManifest& manifest, const ManifestEntry& entry) {
  LoadOptions options;
  options.entry = entry;
  if (entry.term_set) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(manifest.resolve(*entry.term_set)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::configuration, "malformed term set " + entry.term_set->string() + ": " + e.what());
    }
    options.term_set = LinguisticTermSet::from_json(doc);
  }
  return load_fcm(manifest.resolve(entry.path), options);
}

std::string format_fcm_csv(const FcmModel& model, SourceFormat format) {
  std::string out = "id";
  for (const auto& node : model.nodes()) out += "," + node.id;
  out += "\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    out += model.node(i).id;
    for (std::size_t j = 0; j < model.size(); ++j) out += "," + beta_to_cell(model.weight(i, j), format);
    out += "\n";
  }
  return out;
}

nlohmann::json sidecar_json(const FcmModel& model, SourceFormat format) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : model.nodes()) nodes.push_back(node_json(n));
  return {{"format", to_string(format)}, {"nodes", std::move(nodes)}, {"provenance", provenance_json(model.provenance())}};
}

void save_fcm(const FcmModel& model, const fs::path& path, SourceFormat format) {
  // Render both files fully before touching the filesystem.
  const auto csv = format_fcm_csv(model, format);
  const auto side = sidecar_json(model, format).dump(1) + "\n";
  write_text_file_atomic(path, csv);
  write_text_file_atomic(sidecar_path(path), side);
}

}  // namespace fcm
