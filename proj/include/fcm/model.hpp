#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fcm {

/// Condensation level of a map: original variables -> key variables -> concepts.
enum class Level { variables, key_variables, concepts };

std::string_view to_string(Level level);
Level parse_level(std::string_view text);
/// The next level up, if any.
std::optional<Level> parent_level(Level level);

/// How the cells of a stored adjacency matrix are expressed.
enum class SourceFormat { numeric_1, numeric_10, linguistic_13, linguistic_11, beta };

std::string_view to_string(SourceFormat format);
SourceFormat parse_source_format(std::string_view text);

/// The five stakeholder groups plus "aggregate" for social maps.
inline constexpr std::string_view kStakeholderGroups[] = {"private_sector", "public", "experts",
                                                          "managers", "farmers"};
bool is_known_group(std::string_view group);

struct ConceptNode {
  std::string id;
  std::string label;
  Level level = Level::variables;
  /// Number of individual maps in the corpus containing this node.
  int mention_count = 0;
  std::optional<std::string> parent_group;

  friend bool operator==(const ConceptNode&, const ConceptNode&) = default;
};

struct Provenance {
  std::string stakeholder_id;
  std::string group_id;
  Level level = Level::variables;
  SourceFormat source_format = SourceFormat::beta;
  /// individual | group | social
  std::string kind = "individual";
  /// Maps that were aggregated into this one.
  std::vector<std::string> contributors;
  /// Map this one was condensed from.
  std::string source_map;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Dense square matrix of beta weights, row = cause, column = effect.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return data_[from * n_ + to]; }
  double& operator()(std::size_t from, std::size_t to) { return data_[from * n_ + to]; }
  std::span<const double> row(std::size_t from) const { return {data_.data() + from * n_, n_}; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// A fuzzy cognitive map at one condensation level. Immutable once built;
/// the constructor enforces the structural invariants.
class FcmModel {
 public:
  FcmModel(std::vector<ConceptNode> nodes, WeightMatrix weights, Provenance provenance);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<ConceptNode>& nodes() const noexcept { return nodes_; }
  const ConceptNode& node(std::size_t index) const { return nodes_.at(index); }
  const WeightMatrix& weights() const noexcept { return weights_; }
  double weight(std::size_t from, std::size_t to) const { return weights_(from, to); }
  const Provenance& provenance() const noexcept { return provenance_; }
  Level level() const noexcept { return provenance_.level; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Index of `id`; throws not_found when absent.
  std::size_t index_of(std::string_view id) const;
  std::vector<std::string> ids() const;

  /// Number of nonzero off-diagonal weights.
  std::size_t edge_count() const;

  FcmModel with_provenance(Provenance provenance) const;
  FcmModel with_nodes(std::vector<ConceptNode> nodes) const;

  friend bool operator==(const FcmModel& a, const FcmModel& b) {
    return a.nodes_ == b.nodes_ && a.weights_ == b.weights_ && a.provenance_ == b.provenance_;
  }

 private:
  std::vector<ConceptNode> nodes_;
  WeightMatrix weights_;
  Provenance provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Largest admissible |beta| on the base term set.
inline constexpr double kMaxBeta = 6.0;

/// E / (N (N - 1)); requires N >= 2.
double density(const FcmModel& model);

}  // namespace fcm
