#pragma once

// Top-K0 eigendecomposition by eigenvalue magnitude, k-means on the rows of
// the eigenvector matrix, and the spectral community detection pipeline.

#include "dfm/core.hpp"
#include "dfm/model.hpp"
#include "dfm/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace dfm {

struct SpectralPair {
  Matrix u;       // n x K0, orthonormal columns
  Vector lambda;  // descending |lambda|
};

namespace detail {

inline void require_symmetric(const Matrix& s, const char* who) {
  if (s.rows() != s.cols()) {
    throw ValidationError(std::string(who) + ": matrix must be square");
  }
  if (!is_symmetric(s, 1e-10)) {
    throw ValidationError(std::string(who) + ": matrix must be symmetric");
  }
}

/// Order: larger |lambda| first, then larger signed value, then lower index.
inline std::vector<Index> magnitude_order(const Vector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    if (values(a) != values(b)) return values(a) > values(b);
    return a < b;
  });
  return order;
}

}  // namespace detail

inline SpectralPair top_eigs(const Matrix& s, int k0) {
  detail::require_symmetric(s, "top_eigs");
  if (k0 < 1 || k0 > s.rows()) {
    throw ValidationError("top_eigs: K0 must satisfy 1 <= K0 <= n");
  }
  // Eigen reads only the lower triangle; symmetrize to use both halves.
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("top_eigs: symmetric eigensolver did not converge");
  }
  const auto order = detail::magnitude_order(solver.eigenvalues());
  SpectralPair out;
  out.u.resize(s.rows(), k0);
  out.lambda.resize(k0);
  for (int c = 0; c < k0; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    out.u.col(c) = solver.eigenvectors().col(src);
    out.lambda(c) = solver.eigenvalues()(src);
  }
  return out;
}

/// All eigenvalues sorted by descending magnitude.
inline Vector eigenvalues_by_magnitude(const Matrix& s) {
  detail::require_symmetric(s, "eigenvalues_by_magnitude");
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge");
  }
  const auto order = detail::magnitude_order(solver.eigenvalues());
  Vector out(solver.eigenvalues().size());
  for (Index i = 0; i < out.size(); ++i) {
    out(i) = solver.eigenvalues()(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Spectral norm of a symmetric matrix, i.e. its largest |eigenvalue|.
inline double symmetric_spectral_norm(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  return std::abs(eigenvalues_by_magnitude(s)(0));
}

struct KMeansConfig {
  int restarts = 10;
  int max_iterations = 100;
  double tolerance = 1e-8;
  RandomStream rng{42, 0};

  void validate() const {
    if (restarts < 1) throw ValidationError("k-means restarts must be >= 1");
    if (max_iterations < 1) throw ValidationError("k-means max iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw ValidationError("k-means tolerance must be >= 0");
  }
};

struct ClusteringResult {
  std::vector<int> labels;  // 0-based cluster ids
  Matrix centers;           // K x d
  double wcss = 0.0;
  bool degenerate = false;  // fewer than K distinct rows
  int best_restart = 0;
  std::vector<double> wcss_trace;  // WCSS after each assignment, best restart
};

namespace detail {

inline double squared_distance(const Matrix& rows, Index i, const Matrix& centers,
                               Index c) {
  return (rows.row(i) - centers.row(c)).squaredNorm();
}

inline Index count_distinct_rows(const Matrix& rows) {
  std::vector<Index> order(static_cast<std::size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index a, Index b) {
    for (Index c = 0; c < rows.cols(); ++c) {
      if (rows(a, c) != rows(b, c)) return rows(a, c) < rows(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  Index distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

inline Matrix kmeans_pp_seed(const Matrix& rows, int k, RandomStream::Engine& rng) {
  const Index n = rows.rows();
  Matrix centers(k, rows.cols());
  std::vector<double> d2(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::infinity());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  Index first = std::uniform_int_distribution<Index>(0, n - 1)(rng);
  centers.row(0) = rows.row(first);
  chosen[static_cast<std::size_t>(first)] = 1;
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& di = d2[static_cast<std::size_t>(i)];
      di = std::min(di, squared_distance(rows, i, centers, c - 1));
      total += di;
    }
    Index pick = -1;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Index i = 0; i < n; ++i) {
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Index i = n - 1; i >= 0; --i) {
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All points coincide with chosen centers; take an unused index.
      std::vector<Index> unused;
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      pick = unused[std::uniform_int_distribution<std::size_t>(
          0, unused.size() - 1)(rng)];
    }
    chosen[static_cast<std::size_t>(pick)] = 1;
    centers.row(c) = rows.row(pick);
  }
  return centers;
}

struct LloydRun {
  std::vector<int> labels;
  Matrix centers;
  double wcss = 0.0;
  std::vector<double> trace;
};

inline double assign(const Matrix& rows, const Matrix& centers,
                     std::vector<int>& labels) {
  double wcss = 0.0;
  for (Index i = 0; i < rows.rows(); ++i) {
    int best = 0;
    double best_d = squared_distance(rows, i, centers, 0);
    for (Index c = 1; c < centers.rows(); ++c) {
      const double d = squared_distance(rows, i, centers, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    wcss += best_d;
  }
  return wcss;
}

inline LloydRun lloyd(const Matrix& rows, Matrix centers, const KMeansConfig& cfg) {
  const Index n = rows.rows();
  const Index k = centers.rows();
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  double wcss = assign(rows, centers, run.labels);
  run.trace.push_back(wcss);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    Matrix next = Matrix::Zero(k, rows.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      next.row(c) += rows.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    // Empty cluster: move its center onto the point farthest from its own
    // center, taking that point out of a cluster with at least two members.
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int owner = run.labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = squared_distance(rows, i, next, owner);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      const int owner = run.labels[static_cast<std::size_t>(far)];
      --counts[static_cast<std::size_t>(owner)];
      counts[static_cast<std::size_t>(c)] = 1;
      run.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      next.row(c) = rows.row(far);
      next.row(owner).setZero();
      for (Index i = 0; i < n; ++i) {
        if (run.labels[static_cast<std::size_t>(i)] == owner) next.row(owner) += rows.row(i);
      }
      next.row(owner) /= static_cast<double>(counts[static_cast<std::size_t>(owner)]);
    }
    const double shift = (next - centers).rowwise().squaredNorm().maxCoeff();
    centers = std::move(next);
    std::vector<int> previous = run.labels;
    wcss = assign(rows, centers, run.labels);
    run.trace.push_back(wcss);
    if (previous == run.labels || shift <= cfg.tolerance) break;
  }
  run.centers = std::move(centers);
  run.wcss = wcss;
  return run;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds; the best of `restarts` runs by
/// WCSS is returned, ties going to the lower restart index.
inline ClusteringResult kmeans(const Matrix& rows, int k, const KMeansConfig& cfg) {
  cfg.validate();
  if (k < 1) throw ValidationError("kmeans: K must be >= 1");
  if (rows.rows() < k) throw ValidationError("kmeans: need n >= K rows");
  ClusteringResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  best.degenerate = detail::count_distinct_rows(rows) < k;
  for (int r = 0; r < cfg.restarts; ++r) {
    auto rng = cfg.rng.substream(static_cast<std::uint64_t>(r)).engine();
    auto run = detail::lloyd(rows, detail::kmeans_pp_seed(rows, k, rng), cfg);
    if (run.wcss < best.wcss) {
      best.labels = std::move(run.labels);
      best.centers = std::move(run.centers);
      best.wcss = run.wcss;
      best.best_restart = r;
      best.wcss_trace = std::move(run.trace);
    }
  }
  return best;
}

/// Estimated labels from the observed matrix. Ids are arbitrary up to
/// permutation.
inline std::vector<int> dfa(const Matrix& ahat, int k, int k0,
                            const KMeansConfig& cfg) {
  if (k0 < 1 || k0 > k || k > ahat.rows()) {
    throw ValidationError("dfa: need 1 <= K0 <= K <= n");
  }
  const auto eig = top_eigs(ahat, k0);
  return kmeans(eig.u, k, cfg).labels;
}

/// The same pipeline on the population matrix; recovers the true labels up to
/// permutation.
inline std::vector<int> ideal_dfa(const PopulationMatrix& omega, int k, int k0,
                                  const KMeansConfig& cfg) {
  return dfa(omega.omega, k, k0, cfg);
}

}  // namespace dfm
