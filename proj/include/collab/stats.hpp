#pragma once

// Mann-Whitney U rank-sum test between two cohorts, with rank-based
// direction and significance stars.

#include <collab/error.hpp>
#include <collab/roster.hpp>
#include <collab/text.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collab {

enum class Sign { Minus, Zero, Plus };

inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : s == Sign::Minus ? '-' : '0'; }

enum class PMethod { Exact, Normal };

struct RankComparison {
  std::string group_a;
  std::string group_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double u = 0.0;  // statistic for group_a; may be a half-integer under ties
  double p_value = 1.0;
  Sign sign = Sign::Zero;
  std::string stars;
  PMethod method = PMethod::Normal;
};

// Star cutoffs, strictly decreasing inside (0, 1). A p-value below the k-th
// cutoff earns k stars.
class StarThresholds {
 public:
  StarThresholds() : cutoffs_{0.05, 0.01, 0.001} {}
  explicit StarThresholds(std::vector<double> cutoffs) : cutoffs_(std::move(cutoffs)) {
    for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
      if (!(cutoffs_[i] > 0.0 && cutoffs_[i] < 1.0)) throw ConfigError("star thresholds must lie in (0, 1)");
      if (i > 0 && !(cutoffs_[i] < cutoffs_[i - 1])) throw ConfigError("star thresholds must be strictly decreasing");
    }
  }

  static StarThresholds parse(std::string_view csv) {
    std::vector<double> v;
    for (const auto& tok : text::split(csv, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("invalid star threshold '" + tok + "'");
      }
    }
    return StarThresholds(std::move(v));
  }

  const std::vector<double>& cutoffs() const { return cutoffs_; }

 private:
  std::vector<double> cutoffs_;
};

inline std::string stars(double p_value, const StarThresholds& thresholds = {}) {
  std::string out;
  for (double t : thresholds.cutoffs()) {
    if (p_value < t) out.push_back('*');
  }
  return out;
}

namespace detail {

// Midranks (1-based) of the pooled sample, plus sum of t^3 - t over tie groups.
struct PooledRanks {
  std::vector<double> ranks;
  double tie_term = 0.0;
  bool has_ties = false;
};

inline PooledRanks midranks(std::span<const double> pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  PooledRanks out;
  out.ranks.resize(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i);
    if (j - i > 1) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    i = j;
  }
  return out;
}

// Null frequencies of U for sample sizes (m, n): the coefficients of the
// Gaussian binomial [m+n choose m]_q, built by alternately multiplying by
// (1 - q^(n+i)) and dividing by (1 - q^i). Integer-exact; nullopt when the
// total C(m+n, m) would not fit.
inline std::optional<std::vector<__int128>> u_null_counts(std::size_t m, std::size_t n) {
  if (m > n) std::swap(m, n);
  long double total = 1.0L;
  for (std::size_t i = 1; i <= m; ++i) total = total * static_cast<long double>(n + i) / static_cast<long double>(i);
  if (total > 1e36L) return std::nullopt;

  std::vector<__int128> poly(m * n + m + 1, 0);
  poly[0] = 1;
  std::size_t degree = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t shift = n + i;
    for (std::size_t k = degree + shift + 1; k-- > shift;) poly[k] -= poly[k - shift];
    degree += shift;
    for (std::size_t k = i; k <= degree; ++k) poly[k] += poly[k - i];
    degree -= i;
  }
  poly.resize(m * n + 1);
  return poly;
}

inline double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

}  // namespace detail

inline constexpr std::size_t kExactMaxMinSize = 8;

// Two-sided Mann-Whitney test. Exact null distribution for tie-free data
// with min(n_a, n_b) <= 8; otherwise normal approximation with tie-corrected
// variance and a 0.5 continuity correction.
inline RankComparison mann_whitney(std::span<const double> a, std::span<const double> b, std::string group_a = "a",
                                   std::string group_b = "b", const StarThresholds& thresholds = {}) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney test needs two non-empty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranked = detail::midranks(pooled);

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranked.ranks[i];

  RankComparison r;
  r.group_a = std::move(group_a);
  r.group_b = std::move(group_b);
  r.n_a = a.size();
  r.n_b = b.size();
  r.u = rank_sum_a - na * (na + 1.0) / 2.0;
  const double twice_u = 2.0 * r.u;
  const double mn = na * nb;
  r.sign = twice_u > mn ? Sign::Plus : twice_u < mn ? Sign::Minus : Sign::Zero;

  std::optional<std::vector<__int128>> counts;
  if (!ranked.has_ties && std::min(a.size(), b.size()) <= kExactMaxMinSize) {
    counts = detail::u_null_counts(a.size(), b.size());
  }
  if (counts) {
    r.method = PMethod::Exact;
    const auto u = static_cast<std::size_t>(r.u);
    __int128 total = 0;
    __int128 lower = 0;
    __int128 upper = 0;
    for (std::size_t k = 0; k < counts->size(); ++k) {
      total += (*counts)[k];
      if (k <= u) lower += (*counts)[k];
      if (k >= u) upper += (*counts)[k];
    }
    const __int128 tail = std::min(lower, upper);
    r.p_value = std::min(1.0L, 2.0L * static_cast<long double>(tail) / static_cast<long double>(total));
  } else {
    r.method = PMethod::Normal;
    const double n = na + nb;
    const double variance = mn / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    const double diff = r.u - mn / 2.0;
    if (variance <= 0.0 || diff == 0.0) {
      r.p_value = 1.0;
    } else {
      const double correction = diff > 0.0 ? 0.5 : -0.5;
      r.p_value = std::min(1.0, detail::normal_two_sided((diff - correction) / std::sqrt(variance)));
    }
  }
  r.stars = stars(r.p_value, thresholds);
  return r;
}

// One cell of the rank comparison column; `result` is empty when either
// cohort has no members.
struct ComparisonCell {
  Rank a;
  Rank b;
  std::optional<RankComparison> result;
};

inline constexpr std::array<std::pair<Rank, Rank>, 3> kComparisonOrder{
    std::pair{Rank::Full, Rank::Associate}, std::pair{Rank::Associate, Rank::Assistant},
    std::pair{Rank::Assistant, Rank::Full}};

// Full vs Associate, Associate vs Assistant, Assistant vs Full.
inline std::array<ComparisonCell, 3> compare_ranks(const std::array<std::vector<double>, 3>& cohorts,
                                                   const StarThresholds& thresholds = {}) {
  std::array<ComparisonCell, 3> cells;
  for (std::size_t i = 0; i < kComparisonOrder.size(); ++i) {
    const auto [ra, rb] = kComparisonOrder[i];
    cells[i].a = ra;
    cells[i].b = rb;
    const auto& va = cohorts[rank_index(ra)];
    const auto& vb = cohorts[rank_index(rb)];
    if (!va.empty() && !vb.empty()) {
      cells[i].result = mann_whitney(va, vb, std::string(rank_label(ra)), std::string(rank_label(rb)), thresholds);
    }
  }
  return cells;
}

}  // namespace collab
