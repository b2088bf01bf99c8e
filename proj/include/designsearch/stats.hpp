#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace designsearch {

enum class Direction { a_greater, b_greater, equal };

struct RankTestResult {
  Direction direction = Direction::equal;
  double u_a = 0.0;  // Mann-Whitney U of sample a
  double p_value = 1.0;
  bool exact = false;
};

struct SampleSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample form (n - 1)
};

inline SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

namespace detail {

// Midranks (1-based) of the pooled sample; also returns sum of (t^3 - t) over tie groups.
inline std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(pooled.size());
  tie_term = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

// Number of arrangements giving each U value, for samples of size m and n
// without ties (dynamic programming over the recurrence f(m,n,u) =
// f(m-1,n,u-n) + f(m,n-1,u)).
inline std::vector<double> u_distribution(int m, int n) {
  const int max_u = m * n;
  // table[i][j] = counts for sizes (i, j); roll over i.
  std::vector<std::vector<std::vector<double>>> f(static_cast<std::size_t>(m + 1),
                                                  std::vector<std::vector<double>>(static_cast<std::size_t>(n + 1)));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      auto& cell = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      cell.assign(static_cast<std::size_t>(i * j + 1), 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      const auto& left = f[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
      const auto& down = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)];
      for (int u = 0; u <= i * j; ++u) {
        double c = 0.0;
        if (u - j >= 0 && u - j < static_cast<int>(left.size())) c += left[static_cast<std::size_t>(u - j)];
        if (u < static_cast<int>(down.size())) c += down[static_cast<std::size_t>(u)];
        cell[static_cast<std::size_t>(u)] = c;
      }
    }
  auto out = f[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
  out.resize(static_cast<std::size_t>(max_u + 1), 0.0);
  return out;
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

// Two-sided Mann-Whitney U test. Exact null distribution for small tie-free
// samples, otherwise the normal approximation with tie and continuity
// corrections.
inline RankTestResult rank_significance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank test needs two nonempty samples");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const auto ranks = detail::midranks(pooled, tie_term);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);

  RankTestResult r;
  r.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mean_u = na * nb / 2.0;
  r.direction = r.u_a > mean_u ? Direction::a_greater : r.u_a < mean_u ? Direction::b_greater : Direction::equal;

  if (tie_term == 0.0 && a.size() <= 30 && b.size() <= 30) {
    const auto dist = detail::u_distribution(static_cast<int>(a.size()), static_cast<int>(b.size()));
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::lround(r.u_a));
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      if (k <= u) lower += dist[k];
      if (k >= u) upper += dist[k];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    r.exact = true;
    return r;
  }

  const double n = na + nb;
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u_a - mean_u) - 0.5) / std::sqrt(variance);
  r.p_value = std::min(1.0, 2.0 * detail::normal_sf(z));
  return r;
}

}  // namespace designsearch
