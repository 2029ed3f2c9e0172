#pragma once

// Clustering error criteria, spectral deviation, row separation of the
// population eigenvectors, and the error-rate expressions used as
// diagnostics.

#include "dfm/assignment.hpp"
#include "dfm/core.hpp"
#include "dfm/model.hpp"
#include "dfm/spectral.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dfm {

/// Above this K the permutation searches switch from enumeration to exact
/// assignment algorithms.
inline constexpr int kMaxEnumerationK = 8;

namespace detail {

inline void check_partition_pair(std::span<const int> truth, std::span<const int> est,
                                 int k) {
  if (truth.size() != est.size()) {
    throw ValidationError("label vectors differ in length");
  }
  if (k < 1) throw ValidationError("K must be >= 1");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || est[i] < 0 || est[i] >= k) {
      throw ValidationError("label outside [1, K] at node " + std::to_string(i + 1));
    }
  }
}

/// confusion(a, b) = #nodes with truth a and estimate b.
inline Matrix confusion(std::span<const int> truth, std::span<const int> est, int k) {
  Matrix c = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) c(truth[i], est[i]) += 1.0;
  return c;
}

}  // namespace detail

struct HammingResult {
  Index mismatched_nodes = 0;
  double fraction = 0.0;  // mismatched_nodes / n
  double raw_l0 = 0.0;    // n^-1 * min_J ||Zhat J - Z||_0 (2 per misplaced node)
};

inline HammingResult hamming(std::span<const int> truth, std::span<const int> est,
                             int k) {
  detail::check_partition_pair(truth, est, k);
  HammingResult out;
  const auto n = static_cast<double>(truth.size());
  if (truth.empty()) return out;
  const Matrix c = detail::confusion(truth, est, k);
  double best_agree = 0.0;
  if (k <= kMaxEnumerationK) {
    assignment::for_each_permutation(k, [&](const std::vector<int>& perm) {
      double agree = 0.0;
      for (int a = 0; a < k; ++a) agree += c(a, perm[static_cast<std::size_t>(a)]);
      best_agree = std::max(best_agree, agree);
    });
  } else {
    const auto perm = assignment::min_sum(-c);
    for (int a = 0; a < k; ++a) best_agree += c(a, perm[static_cast<std::size_t>(a)]);
  }
  out.mismatched_nodes = static_cast<Index>(n - best_agree + 0.5);
  out.fraction = static_cast<double>(out.mismatched_nodes) / n;
  out.raw_l0 = 2.0 * static_cast<double>(out.mismatched_nodes) / n;
  return out;
}

/// Fraction of misplaced nodes after the best relabeling.
inline double hamming_error(std::span<const int> truth, std::span<const int> est,
                            int k) {
  return hamming(truth, est, k).fraction;
}

inline double hamming_error(const CommunityLabels& truth, std::span<const int> est) {
  return hamming_error(truth.ids(), est, truth.k());
}

/// min over permutations of the largest per-community symmetric-difference
/// proportion. Truth communities must be non-empty; estimated ones may be
/// empty.
inline double f_hat(std::span<const int> truth, std::span<const int> est, int k) {
  detail::check_partition_pair(truth, est, k);
  const Matrix c = detail::confusion(truth, est, k);
  const Vector truth_sizes = c.rowwise().sum();
  const Vector est_sizes = c.colwise().sum().transpose();
  for (int a = 0; a < k; ++a) {
    if (truth_sizes(a) == 0.0) {
      throw ValidationError("f_hat: true community " + std::to_string(a + 1) + " is empty");
    }
  }
  Matrix cost(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      cost(a, b) = (truth_sizes(a) - c(a, b) + est_sizes(b) - c(a, b)) / truth_sizes(a);
    }
  }
  auto worst = [&](const std::vector<int>& perm) {
    double w = 0.0;
    for (int a = 0; a < k; ++a) w = std::max(w, cost(a, perm[static_cast<std::size_t>(a)]));
    return w;
  };
  if (k <= kMaxEnumerationK) {
    double best = std::numeric_limits<double>::infinity();
    assignment::for_each_permutation(
        k, [&](const std::vector<int>& perm) { best = std::min(best, worst(perm)); });
    return best;
  }
  return worst(assignment::min_max(cost));
}

/// Spectral norm of Ahat - Omega.
inline double spectral_deviation(const Matrix& ahat, const Matrix& omega) {
  if (ahat.rows() != omega.rows() || ahat.cols() != omega.cols()) {
    throw ValidationError("spectral_deviation: shapes differ");
  }
  const Matrix diff = ahat - omega;
  if (is_symmetric(diff)) return symmetric_spectral_norm(diff);
  return singular_values(diff)(0);
}

struct DeltaReport {
  double delta = 0.0;  // min_{k != l} ||B(k,:) - B(l,:)||
  /// sqrt(2 / n_max), a lower bound on delta when K0 = K; NaN otherwise.
  double reference = std::numeric_limits<double>::quiet_NaN();
};

/// Row separation of B = U(I, :), with U the top-K0 eigenvectors of Omega and
/// I the canonical index set.
inline DeltaReport delta_separation(const Matrix& omega, const CommunityLabels& labels,
                                    int k0) {
  DeltaReport out;
  const int k = labels.k();
  const auto sizes = community_sizes(labels, k0);
  if (k0 == k) out.reference = std::sqrt(2.0 / static_cast<double>(sizes.n_max));
  if (k == 1) {
    out.delta = std::numeric_limits<double>::infinity();
    return out;
  }
  const Matrix u = top_eigs(omega, k0).u;
  const auto index = canonical_index_set(labels);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double d = (u.row(index[static_cast<std::size_t>(a)]) -
                        u.row(index[static_cast<std::size_t>(b)])).norm();
      best = std::min(best, d);
    }
  }
  out.delta = best;
  return out;
}

inline DeltaReport delta_separation(const PopulationMatrix& omega,
                                    const MembershipMatrix& z, int k0) {
  return delta_separation(omega.omega, membership_to_labels(z), k0);
}

struct SigmaBoundCheck {
  double sigma_k0_omega = 0.0;  // sigma_{K0}(Omega)
  double bound = 0.0;           // rho * sigma_{K0}(P) * n_{K0}
  bool holds = false;           // sigma_k0_omega >= bound - 1e-6 * bound
  double min_size_bound = 0.0;  // rho * sigma_{K0}(P) * n_min
  bool min_size_holds = false;
};

/// Numerical check of sigma_{K0}(Omega) >= rho * sigma_{K0}(P) * n_{K0}, with
/// n_{K0} the K0-th largest community size. The n_min variant is reported
/// alongside.
inline SigmaBoundCheck sigma_lower_bound_check(const ModelSpec& spec) {
  SigmaBoundCheck out;
  const auto omega = build_omega(spec);
  const Vector eig = eigenvalues_by_magnitude(omega.omega);
  out.sigma_k0_omega = std::abs(eig(spec.k0() - 1));
  const auto sizes = spec.sizes();
  const double scale = spec.rho() * spec.connectivity().sigma_k0();
  out.bound = scale * static_cast<double>(sizes.n_k0);
  out.holds = out.sigma_k0_omega >= out.bound - 1e-6 * out.bound;
  out.min_size_bound = scale * static_cast<double>(sizes.n_min);
  out.min_size_holds = out.sigma_k0_omega >= out.min_size_bound - 1e-6 * out.min_size_bound;
  return out;
}

/// Error-rate expressions without their unspecified constants. Keys:
///   with_noise_general, with_noise_full_rank, with_noise_balanced,
///   signal_only_general, signal_only_full_rank, signal_only_balanced.
/// The full-rank and balanced forms are present only when K0 = K.
using RateValues = std::map<std::string, double>;

inline RateValues theoretical_rate(const ModelSpec& spec, double gamma,
                                   double sigma2w, double delta) {
  if (!(delta > 0.0)) {
    throw ValidationError("theoretical_rate: delta must be > 0 (rate undefined)");
  }
  const auto sizes = spec.sizes();
  const double n = static_cast<double>(spec.n());
  const double k = spec.k();
  const double k0 = spec.k0();
  const double rho = spec.rho();
  const double log_n = std::log(n);
  const double s = spec.connectivity().sigma_k0();
  const double s2 = s * s;
  const double n_k0 = static_cast<double>(sizes.n_k0);
  const double n_min = static_cast<double>(sizes.n_min);
  const double n_max = static_cast<double>(sizes.n_max);
  const double variance_term = gamma * rho * n + sigma2w * n;

  RateValues out;
  out["with_noise_general"] = k0 * k * variance_term * log_n /
                              (s2 * rho * rho * delta * delta * n_k0 * n_k0 * n_min);
  out["signal_only_general"] =
      k0 * k * gamma * n * log_n / (s2 * rho * delta * delta * n_k0 * n_k0 * n_min);
  if (spec.k0() == spec.k()) {
    out["with_noise_full_rank"] =
        k * k * variance_term * n_max * log_n / (s2 * rho * rho * n_min * n_min * n_min);
    out["with_noise_balanced"] = variance_term * log_n / (s2 * rho * rho * n * n);
    out["signal_only_full_rank"] =
        k * k * gamma * n_max * n * log_n / (s2 * rho * n_min * n_min * n_min);
    out["signal_only_balanced"] = gamma * log_n / (s2 * rho * n);
  }
  return out;
}

struct ErrorReport {
  double hamming = 0.0;
  double hamming_raw_l0 = 0.0;
  double fhat = 0.0;
  double spectral_deviation = 0.0;
  double delta = 0.0;
  RateValues rate_values;
};

inline ErrorReport evaluate(const CommunityLabels& truth, std::span<const int> est,
                            const Matrix& ahat, const Matrix& omega, double delta) {
  ErrorReport out;
  const auto h = hamming(truth.ids(), est, truth.k());
  out.hamming = h.fraction;
  out.hamming_raw_l0 = h.raw_l0;
  out.fhat = f_hat(truth.ids(), est, truth.k());
  out.spectral_deviation = spectral_deviation(ahat, omega);
  out.delta = delta;
  return out;
}

}  // namespace dfm
