#pragma once

// Exact permutation search over K x K score matrices: sum-optimal assignment
// (Hungarian) and bottleneck assignment (threshold search + matching).

#include "dfm/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace dfm::assignment {

/// perm[r] = column assigned to row r, minimizing the summed cost.
inline std::vector<int> min_sum(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(n, -1);
  for (int j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

namespace detail {
inline bool augment(int r, const std::vector<std::vector<int>>& adj,
                    std::vector<int>& match_col, std::vector<char>& seen) {
  for (int c : adj[static_cast<std::size_t>(r)]) {
    if (seen[static_cast<std::size_t>(c)]) continue;
    seen[static_cast<std::size_t>(c)] = 1;
    if (match_col[static_cast<std::size_t>(c)] < 0 ||
        augment(match_col[static_cast<std::size_t>(c)], adj, match_col, seen)) {
      match_col[static_cast<std::size_t>(c)] = r;
      return true;
    }
  }
  return false;
}

/// Perfect matching using only entries with cost <= threshold, or empty.
inline std::vector<int> perfect_matching(const Matrix& cost, double threshold) {
  const int n = static_cast<int>(cost.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (cost(r, c) <= threshold) adj[static_cast<std::size_t>(r)].push_back(c);
    }
  }
  std::vector<int> match_col(static_cast<std::size_t>(n), -1);
  for (int r = 0; r < n; ++r) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    if (!augment(r, adj, match_col, seen)) return {};
  }
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  for (int c = 0; c < n; ++c) perm[static_cast<std::size_t>(match_col[static_cast<std::size_t>(c)])] = c;
  return perm;
}
}  // namespace detail

/// perm[r] = column assigned to row r, minimizing the largest chosen cost.
/// Binary search over the distinct cost values with a matching feasibility
/// test, so the optimum is exact.
inline std::vector<int> min_max(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};
  std::vector<double> values(cost.data(), cost.data() + cost.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::size_t lo = 0, hi = values.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (detail::perfect_matching(cost, values[mid]).empty()) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return detail::perfect_matching(cost, values[lo]);
}

/// Calls fn(perm) for every permutation of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_permutation(int n, Fn&& fn) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    fn(static_cast<const std::vector<int>&>(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace dfm::assignment
