#include "fcm/linguistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcm/errors.hpp"

namespace fcm {

namespace {

constexpr double kPartitionTolerance = 1e-9;

std::string describe(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

std::vector<std::string> signed_labels(const std::vector<std::string>& positive) {
  // positive = {VL, L, ...} from weakest to strongest
  std::vector<std::string> labels;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) labels.push_back("-" + *it);
  labels.emplace_back("Null");
  labels.insert(labels.end(), positive.begin(), positive.end());
  return labels;
}

// Apex of term i on a uniform partition. Computed from the term index so that
// symmetric domains give exact apexes (b_i = i / g on [-1, 1]).
double uniform_apex(int i, int g, Interval domain) {
  const double mid = 0.5 * (domain.lo + domain.hi);
  const double half = 0.5 * (domain.hi - domain.lo);
  return mid + half * (static_cast<double>(i) / g);
}

}  // namespace

LinguisticTermSet::LinguisticTermSet(int g, std::vector<std::string> labels, Interval domain,
                                     std::vector<Triangle> triangles)
    : g_(g), labels_(std::move(labels)), domain_(domain), triangles_(std::move(triangles)) {
  validate();
}

LinguisticTermSet LinguisticTermSet::uniform(int half_width, std::vector<std::string> labels,
                                             Interval domain) {
  if (half_width < 1) fail(ErrorKind::configuration, "term set half width must be >= 1");
  if (!(domain.lo < domain.hi)) fail(ErrorKind::configuration, "term set domain must be non-empty");
  std::vector<Triangle> triangles;
  triangles.reserve(2 * half_width + 1);
  for (int i = -half_width; i <= half_width; ++i) {
    triangles.push_back({uniform_apex(i - 1, half_width, domain), uniform_apex(i, half_width, domain),
                         uniform_apex(i + 1, half_width, domain)});
  }
  return LinguisticTermSet(half_width, std::move(labels), domain, std::move(triangles));
}

LinguisticTermSet LinguisticTermSet::custom(int half_width, std::vector<std::string> labels,
                                            Interval domain, std::vector<Triangle> triangles) {
  return LinguisticTermSet(half_width, std::move(labels), domain, std::move(triangles));
}

LinguisticTermSet LinguisticTermSet::from_json(const nlohmann::json& doc) {
  try {
    const int g = doc.at("g").get<int>();
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    Interval domain{};
    if (doc.contains("domain")) {
      const auto bounds = doc.at("domain").get<std::vector<double>>();
      if (bounds.size() != 2) fail(ErrorKind::configuration, "term set domain must be [lo, hi]");
      domain = {bounds[0], bounds[1]};
    }
    auto set = uniform(g, labels, domain);
    if (doc.contains("triangles")) {
      auto triangles = set.triangles_;
      for (const auto& [key, params] : doc.at("triangles").items()) {
        // keyed by label: {"VH": [a, b, c]}
        const auto abc = params.get<std::vector<double>>();
        if (abc.size() != 3) fail(ErrorKind::configuration, "triangle override needs [a, b, c]");
        triangles[set.index_of(key) + g] = {abc[0], abc[1], abc[2]};
      }
      return custom(g, std::move(labels), domain, std::move(triangles));
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::configuration, std::string("invalid term set document: ") + e.what());
  }
}

nlohmann::json LinguisticTermSet::to_json() const {
  nlohmann::json triangles = nlohmann::json::object();
  for (int i = -g_; i <= g_; ++i) {
    const auto& t = triangle(i);
    triangles[label(i)] = {t.a, t.b, t.c};
  }
  return {{"g", g_},
          {"labels", labels_},
          {"domain", {domain_.lo, domain_.hi}},
          {"triangles", std::move(triangles)}};
}

void LinguisticTermSet::validate() const {
  const auto n = static_cast<std::size_t>(2 * g_ + 1);
  if (g_ < 1) fail(ErrorKind::configuration, "term set half width must be >= 1");
  if (labels_.size() != n || triangles_.size() != n) {
    fail(ErrorKind::configuration,
         "term set with g=" + std::to_string(g_) + " needs exactly " + std::to_string(n) + " terms");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != n) {
    fail(ErrorKind::configuration, "term set labels must be unique");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = triangles_[k];
    if (!(t.a <= t.b && t.b <= t.c)) {
      fail(ErrorKind::configuration, "triangle for '" + labels_[k] + "' violates a <= b <= c");
    }
    if (k > 0 && !(triangles_[k - 1].b < t.b)) {
      fail(ErrorKind::configuration, "triangle apexes must be strictly increasing");
    }
  }
  // Partition of unity sampled across every inter-apex interval.
  constexpr int kSamples = 16;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lo = std::max(triangles_[k].b, domain_.lo);
    const double hi = std::min(triangles_[k + 1].b, domain_.hi);
    for (int s = 0; s <= kSamples; ++s) {
      const double x = lo + (hi - lo) * s / kSamples;
      double total = 0.0;
      for (int i = -g_; i <= g_; ++i) total += membership(i, x);
      if (std::abs(total - 1.0) > kPartitionTolerance) {
        fail(ErrorKind::configuration,
             "term set memberships do not sum to 1 at x=" + describe(x));
      }
    }
  }
}

const Triangle& LinguisticTermSet::triangle(int term) const {
  if (!contains_term(term)) {
    fail(ErrorKind::input_range, "term index " + std::to_string(term) + " outside [-" +
                                     std::to_string(g_) + ", " + std::to_string(g_) + "]");
  }
  return triangles_[static_cast<std::size_t>(term + g_)];
}

const std::string& LinguisticTermSet::label(int term) const {
  triangle(term);
  return labels_[static_cast<std::size_t>(term + g_)];
}

int LinguisticTermSet::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) fail(ErrorKind::parse, "unknown linguistic label '" + std::string(label) + "'");
  return static_cast<int>(it - labels_.begin()) - g_;
}

double LinguisticTermSet::membership(int term, double x) const {
  if (!(x >= domain_.lo && x <= domain_.hi)) {
    fail(ErrorKind::input_range, "value " + describe(x) + " outside term set domain");
  }
  const auto& [a, b, c] = triangle(term);
  if (x == b) return 1.0;
  if (a <= x && x < b) return (x - a) / (b - a);
  if (b < x && x <= c) return (c - x) / (c - b);
  return 0.0;
}

bool LinguisticTermSet::operator==(const LinguisticTermSet& other) const {
  if (g_ != other.g_ || labels_ != other.labels_ || domain_.lo != other.domain_.lo ||
      domain_.hi != other.domain_.hi) {
    return false;
  }
  for (std::size_t k = 0; k < triangles_.size(); ++k) {
    const auto& l = triangles_[k];
    const auto& r = other.triangles_[k];
    if (l.a != r.a || l.b != r.b || l.c != r.c) return false;
  }
  return true;
}

const LinguisticTermSet& base_term_set() {
  static const LinguisticTermSet set =
      LinguisticTermSet::uniform(6, signed_labels({"VL", "L", "M", "H", "VH", "VVH"}));
  return set;
}

const LinguisticTermSet& eleven_term_set() {
  static const LinguisticTermSet set =
      LinguisticTermSet::uniform(5, signed_labels({"VL", "L", "M", "H", "VH"}));
  return set;
}

Beta beta_from_numeric(double x, const LinguisticTermSet& set) {
  double weighted = 0.0;
  double total = 0.0;
  const int g = set.half_width();
  for (int i = -g; i <= g; ++i) {
    const double mu = set.membership(i, x);
    weighted += i * mu;
    total += mu;
  }
  if (!(total > 0.0)) fail(ErrorKind::degenerate_input, "no term has membership at " + describe(x));
  return Beta{weighted / total};
}

Fuzzy2Tuple tuple_from_beta(Beta beta, const LinguisticTermSet& set) {
  const double g = set.half_width();
  if (!(std::abs(beta.value) <= g)) {
    fail(ErrorKind::input_range, "beta " + describe(beta.value) + " outside [-g, g]");
  }
  // std::round rounds halves away from zero, which keeps the map odd.
  const double i = std::round(beta.value);
  return Fuzzy2Tuple{static_cast<int>(i), beta.value - i};
}

Beta beta_from_tuple(Fuzzy2Tuple t, const LinguisticTermSet& set) {
  if (!is_valid_tuple(t, set)) {
    fail(ErrorKind::input_range, "invalid 2-tuple (s_" + std::to_string(t.term) + ", " +
                                     describe(t.alpha) + ")");
  }
  return Beta{t.term + t.alpha};
}

Fuzzy2Tuple tuple_from_term(int term, const LinguisticTermSet& set) {
  set.triangle(term);
  return Fuzzy2Tuple{term, 0.0};
}

bool is_valid_tuple(Fuzzy2Tuple t, const LinguisticTermSet& set) {
  if (!set.contains_term(t.term)) return false;
  if (!(std::abs(t.alpha) <= 0.5)) return false;
  const double beta = t.term + t.alpha;
  if (std::abs(beta) > set.half_width()) return false;
  return std::round(beta) == t.term;
}

Beta normalize_to_blts(Fuzzy2Tuple value, const LinguisticTermSet& source) {
  const auto& base = base_term_set();
  if (!(source == base) && !(source == eleven_term_set())) {
    fail(ErrorKind::configuration, "no BLTS normalization for a term set with g=" +
                                       std::to_string(source.half_width()));
  }
  if (!is_valid_tuple(value, source)) {
    fail(ErrorKind::input_range, "invalid 2-tuple for source term set");
  }
  if (source == base) return Beta{value.term + value.alpha};

  // Position on the shared domain, interpolated between neighbouring apexes.
  const double apex = source.triangle(value.term).b;
  double x = apex;
  if (value.alpha > 0.0) {
    x = apex + value.alpha * (source.triangle(value.term + 1).b - apex);
  } else if (value.alpha < 0.0) {
    x = apex + value.alpha * (apex - source.triangle(value.term - 1).b);
  }
  x = std::clamp(x, base.domain().lo, base.domain().hi);
  return beta_from_numeric(x, base);
}

Beta normalize_to_blts(double value, NumericScale scale) {
  const double x = scale == NumericScale::ten ? value / 10.0 : value;
  return beta_from_numeric(x, base_term_set());
}

TermPair split_beta(Beta beta, const LinguisticTermSet& set) {
  const int g = set.half_width();
  if (!(std::abs(beta.value) <= g)) {
    fail(ErrorKind::input_range, "beta " + describe(beta.value) + " outside [-g, g]");
  }
  // floor, not truncation toward zero, so gamma stays in [0, 1) for negative beta
  const int h = static_cast<int>(std::floor(beta.value));
  const double gamma = beta.value - h;
  if (h == g) return TermPair{g, 1.0, g, 0.0};
  return TermPair{h, 1.0 - gamma, h + 1, gamma};
}

double crisp_value(int term, const LinguisticTermSet& set) {
  const auto domain = set.domain();
  return (set.triangle(term).b - domain.lo) / (domain.hi - domain.lo);
}

double defuzzify(Beta beta, const LinguisticTermSet& set) {
  const auto pair = split_beta(beta, set);
  return crisp_value(pair.low_term, set) * pair.low_weight +
         crisp_value(pair.high_term, set) * pair.high_weight;
}

double defuzzify_unipolar(Beta beta, int half_width) {
  if (half_width < 1) fail(ErrorKind::configuration, "half width must be >= 1");
  if (!(beta.value >= 0.0 && beta.value <= half_width)) {
    fail(ErrorKind::input_range, "unipolar beta " + describe(beta.value) + " outside [0, g]");
  }
  const int h = static_cast<int>(std::floor(beta.value));
  const double gamma = beta.value - h;
  if (h == half_width) return 1.0;
  const auto cv = [half_width](int i) { return static_cast<double>(i) / half_width; };
  return cv(h) * (1.0 - gamma) + cv(h + 1) * gamma;
}

}  // namespace fcm
