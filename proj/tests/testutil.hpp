#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// Exact two-sided Mann-Whitney p by enumerating every assignment of the
// pooled ranks (continuous data, no ties): P(|U - mu| >= |u_obs - mu|).
// Independent of the library implementation.
inline double mw_exact_two_sided_p(std::size_t na, std::size_t nb, double u_obs) {
  const std::size_t n = na + nb;
  const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  const double dev = std::abs(u_obs - mu);

  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < na; ++i) mask[n - 1 - i] = true;  // lexicographically first
  std::sort(mask.begin(), mask.end());

  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  // iterate all combinations via std::next_permutation over the mask
  do {
    // ranks are 1..n; U_A = sum of ranks of A - na(na+1)/2
    double rank_sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask[r]) rank_sum += static_cast<double>(r + 1);
    }
    const double u = rank_sum - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
    ++total;
    if (std::abs(u - mu) >= dev - 1e-12) ++extreme;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

// Observed U of sample a against b (continuous data, no ties).
inline double mw_u_statistic(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  }
  return u;
}

inline std::vector<double> random_vector(std::mt19937& gen, std::size_t n,
                                         double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline bool approx_rel(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * std::max(scale, 1e-300);
}

}  // namespace testutil
