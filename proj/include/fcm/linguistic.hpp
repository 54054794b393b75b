#pragma once

// Fuzzy 2-tuple linguistic representation over triangular term sets.
//
// Every imprecise weight (numeric in [-1,1] or [-10,10], or a label from a
// 13- or 11-term set) is reduced to a numeric "beta" on the 13-term base set
// (BLTS), whose 2-tuple form (s_i, alpha) is lossless.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fcm {

struct Triangle {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Numeric equivalent of a 2-tuple on a term set of half width g.
struct Beta {
  double value = 0.0;

  friend bool operator==(const Beta&, const Beta&) = default;
};

/// (s_i, alpha) with alpha the symbolic translation in [-0.5, 0.5].
struct Fuzzy2Tuple {
  int term = 0;
  double alpha = 0.0;

  friend bool operator==(const Fuzzy2Tuple&, const Fuzzy2Tuple&) = default;
};

/// Ordered set of 2g+1 triangular terms s_{-g} .. s_{+g} on a closed domain.
class LinguisticTermSet {
 public:
  /// Uniform Ruspini partition: apexes evenly spaced over the domain.
  static LinguisticTermSet uniform(int half_width, std::vector<std::string> labels,
                                   Interval domain = {});

  /// Explicit triangles; validated for ordering and partition of unity.
  static LinguisticTermSet custom(int half_width, std::vector<std::string> labels, Interval domain,
                                  std::vector<Triangle> triangles);

  /// {g, labels[], domain:[lo,hi], triangles?:[[a,b,c],...]}
  static LinguisticTermSet from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  int half_width() const noexcept { return g_; }
  std::size_t size() const noexcept { return labels_.size(); }
  Interval domain() const noexcept { return domain_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool contains_term(int term) const noexcept { return term >= -g_ && term <= g_; }
  const Triangle& triangle(int term) const;
  const std::string& label(int term) const;
  /// Term index for a label; throws a parse-kind error when unknown.
  int index_of(std::string_view label) const;

  /// Triangular membership of x in term `term`.
  double membership(int term, double x) const;

  bool operator==(const LinguisticTermSet& other) const;

 private:
  LinguisticTermSet(int g, std::vector<std::string> labels, Interval domain,
                    std::vector<Triangle> triangles);
  void validate() const;

  int g_ = 0;
  std::vector<std::string> labels_;
  Interval domain_;
  std::vector<Triangle> triangles_;
};

/// The 13-term base set (g = 6) on [-1, 1]: -VVH .. Null .. VVH.
const LinguisticTermSet& base_term_set();
/// The 11-term set (g = 5) on [-1, 1]: -VH .. Null .. VH.
const LinguisticTermSet& eleven_term_set();

/// Weighted term average sum(i * mu_i(x)) / sum(mu_i(x)).
Beta beta_from_numeric(double x, const LinguisticTermSet& set);

/// i = round(beta) (half away from zero), alpha = beta - i.
Fuzzy2Tuple tuple_from_beta(Beta beta, const LinguisticTermSet& set = base_term_set());
Beta beta_from_tuple(Fuzzy2Tuple t, const LinguisticTermSet& set = base_term_set());
Fuzzy2Tuple tuple_from_term(int term, const LinguisticTermSet& set = base_term_set());

/// Validity per the 2-tuple definition: term in range, |alpha| <= 0.5 and
/// round(term + alpha) == term.
bool is_valid_tuple(Fuzzy2Tuple t, const LinguisticTermSet& set = base_term_set());

/// Map a 2-tuple expressed on `source` (the BLTS itself or the 11-term set)
/// onto the BLTS: interpolate the term apexes on the shared domain, then take
/// beta_from_numeric under the BLTS.
Beta normalize_to_blts(Fuzzy2Tuple value, const LinguisticTermSet& source);

enum class NumericScale { unit, ten };

/// Numeric weights in [-1,1] (unit) or [-10,10] (ten, divided by 10 first).
Beta normalize_to_blts(double value, NumericScale scale);

/// delta(beta) = {(s_h, 1 - gamma), (s_{h+1}, gamma)} with h = floor(beta).
struct TermPair {
  int low_term = 0;
  double low_weight = 1.0;
  int high_term = 0;
  double high_weight = 0.0;
};

TermPair split_beta(Beta beta, const LinguisticTermSet& set = base_term_set());

/// Crisp value of term i: apex position normalized to [0, 1] (mean of maximum).
double crisp_value(int term, const LinguisticTermSet& set = base_term_set());

/// CV(s_h)(1 - gamma) + CV(s_{h+1}) gamma; on the BLTS this is (beta + 6) / 12.
double defuzzify(Beta beta, const LinguisticTermSet& set = base_term_set());

/// Same two-term interpolation over the unipolar scale s_0 .. s_g on [0, 1]
/// (CV(s_i) = i / g). Centrality scores live on this scale: zero centrality
/// must defuzzify to zero credibility.
double defuzzify_unipolar(Beta beta, int half_width = 6);

}  // namespace fcm
