#pragma once

// Node and map centralities over beta-weighted digraphs, the consensus
// centrality measure (CCM) and the credibility weights derived from it.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcm/model.hpp"

namespace fcm {

/// b_D, b_C, b_B; must be nonnegative and sum to 1.
struct PrioritizationWeights {
  double degree = 1.0 / 3.0;
  double closeness = 1.0 / 3.0;
  double betweenness = 1.0 / 3.0;

  /// Throws a configuration error unless the weights are a convex triple.
  void validate() const;
  friend bool operator==(const PrioritizationWeights&, const PrioritizationWeights&) = default;
};

/// How a weight turns into a path length for closeness and betweenness.
enum class EdgeLength {
  /// 1 / |beta|: stronger influence means a shorter path.
  inverse,
  /// |beta| taken directly as the traversal cost.
  magnitude,
};

std::string_view to_string(EdgeLength length);
EdgeLength parse_edge_length(std::string_view text);

struct CentralityOptions {
  PrioritizationWeights weights;
  EdgeLength edge_length = EdgeLength::inverse;
  /// Upper end of the scale the node measures are mapped onto before they are
  /// combined (the BLTS half width).
  double scale = kMaxBeta;
};

/// Relative tolerance under which two path lengths count as the same
/// shortest distance.
inline constexpr double kPathTieTolerance = 1e-9;

/// sum_j |w_ij| + sum_j |w_ji|.
double degree_centrality(const FcmModel& m, std::size_t node);
std::vector<double> degree_centralities(const FcmModel& m);

/// 1 / sum_t d(t, node) over the nodes t that reach `node`; 0 if none do.
std::vector<double> closeness_centralities(const FcmModel& m, EdgeLength length = EdgeLength::inverse);
/// sum over ordered pairs s != node != t of sigma_st(node) / sigma_st.
std::vector<double> betweenness_centralities(const FcmModel& m, EdgeLength length = EdgeLength::inverse);

double closeness_centrality(const FcmModel& m, std::size_t node, EdgeLength length = EdgeLength::inverse);
double betweenness_centrality(const FcmModel& m, std::size_t node, EdgeLength length = EdgeLength::inverse);

/// b_D * degree + b_C * closeness + b_B * betweenness.
double consensus_centrality(double degree, double closeness, double betweenness,
                            const PrioritizationWeights& weights);

/// Min-max map of `values` onto [0, scale]. A constant vector maps to `scale`
/// when positive and to 0 otherwise.
std::vector<double> scale_to_range(std::span<const double> values, double scale);

struct NodeCentrality {
  std::string id;
  double degree = 0.0;
  double closeness = 0.0;
  double betweenness = 0.0;
  /// The three measures mapped onto [0, scale].
  double scaled_degree = 0.0;
  double scaled_closeness = 0.0;
  double scaled_betweenness = 0.0;
  double ccm = 0.0;
  double credibility_weight = 0.0;
};

struct MapCentrality {
  double degree = 0.0;
  double closeness = 0.0;
  double betweenness = 0.0;
  double consensus = 0.0;
};

struct CentralityReport {
  std::vector<NodeCentrality> nodes;
  /// Absent when the map is too small for the map-level indices (N < 4).
  std::optional<MapCentrality> map;
  CentralityOptions options;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;

  nlohmann::json to_json() const;
  /// id,degree,closeness,betweenness,ccm,cw
  std::string to_csv() const;
};

CentralityReport analyze_centrality(const FcmModel& m, const CentralityOptions& options = {});

/// Map-level indices from the scaled node measures; requires N >= 4.
MapCentrality map_centrality(const FcmModel& m, const CentralityOptions& options = {});

/// Defuzzify each CCM on the unipolar [0, scale] term scale and normalize to
/// sum 1. Throws degenerate-input when every CCM is zero.
std::vector<double> credibility_from_ccm(std::span<const double> ccm, double scale = kMaxBeta);

std::vector<double> node_credibility_weights(const FcmModel& m, const CentralityOptions& options = {});

/// cw_k = Cen_Cons(FCM_k) / sum_j Cen_Cons(FCM_j).
std::vector<double> fcm_credibility_weights(std::span<const FcmModel> maps,
                                            const CentralityOptions& options = {});
std::vector<double> fcm_credibility_weights(std::span<const FcmModel* const> maps,
                                            const CentralityOptions& options = {});

}  // namespace fcm
