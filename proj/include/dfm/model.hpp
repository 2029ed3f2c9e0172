#pragma once

// Model parameterization: community labels, membership matrix Z, connectivity
// matrix P, and the population matrix Omega = rho * Z * P * Z'.

#include "dfm/core.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace dfm {

/// Community assignment of n nodes into K groups. Ids are 0-based here;
/// external formats use 1-based ids and convert at the boundary.
class CommunityLabels {
 public:
  CommunityLabels() = default;

  CommunityLabels(std::vector<int> ids, int k) : ids_(std::move(ids)), k_(k) {
    if (k_ < 1) throw ValidationError("community count K must be >= 1");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i] < 0 || ids_[i] >= k_) {
        std::ostringstream msg;
        msg << "label of node " << i + 1 << " is " << ids_[i] + 1
            << ", outside [1, " << k_ << "]";
        throw ValidationError(msg.str());
      }
    }
  }

  static CommunityLabels from_one_based(std::span<const int> ids, int k) {
    std::vector<int> zero_based(ids.begin(), ids.end());
    for (int& id : zero_based) --id;
    return CommunityLabels(std::move(zero_based), k);
  }

  std::vector<int> to_one_based() const {
    std::vector<int> out(ids_);
    for (int& id : out) ++id;
    return out;
  }

  int operator[](std::size_t i) const { return ids_[i]; }
  std::size_t size() const { return ids_.size(); }
  int k() const { return k_; }
  const std::vector<int>& ids() const { return ids_; }

  std::vector<Index> sizes() const {
    std::vector<Index> counts(static_cast<std::size_t>(k_), 0);
    for (int id : ids_) ++counts[static_cast<std::size_t>(id)];
    return counts;
  }

  /// Every community in [K] has at least one node (rank(Z) = K).
  bool covers_all() const {
    const auto counts = sizes();
    return std::none_of(counts.begin(), counts.end(),
                        [](Index c) { return c == 0; });
  }

  friend bool operator==(const CommunityLabels&, const CommunityLabels&) = default;

 private:
  std::vector<int> ids_;
  int k_ = 1;
};

/// n x K one-hot matrix with every column used.
class MembershipMatrix {
 public:
  explicit MembershipMatrix(Matrix z) : z_(std::move(z)) {
    for (Index i = 0; i < z_.rows(); ++i) {
      int ones = 0;
      for (Index k = 0; k < z_.cols(); ++k) {
        const double v = z_(i, k);
        if (v == 1.0) {
          ++ones;
        } else if (v != 0.0) {
          throw ValidationError("membership matrix entries must be 0 or 1");
        }
      }
      if (ones != 1) {
        std::ostringstream msg;
        msg << "membership row " << i + 1 << " has row sum " << ones
            << ", expected exactly 1";
        throw ValidationError(msg.str());
      }
    }
    for (Index k = 0; k < z_.cols(); ++k) {
      if (z_.col(k).sum() == 0.0) {
        std::ostringstream msg;
        msg << "community " << k + 1 << " is empty (rank(Z) < K)";
        throw ValidationError(msg.str());
      }
    }
  }

  const Matrix& matrix() const { return z_; }
  Index n() const { return z_.rows(); }
  int k() const { return static_cast<int>(z_.cols()); }

 private:
  Matrix z_;
};

inline MembershipMatrix labels_to_membership(const CommunityLabels& labels) {
  const auto counts = labels.sizes();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw ValidationError("empty community " + std::to_string(k + 1) +
                            " (rank(Z) < K)");
    }
  }
  Matrix z = Matrix::Zero(static_cast<Index>(labels.size()), labels.k());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    z(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return MembershipMatrix(std::move(z));
}

/// Reads labels back from a one-hot matrix; rejects rows that are not
/// exactly one-hot.
inline CommunityLabels membership_to_labels(const Matrix& z) {
  std::vector<int> ids(static_cast<std::size_t>(z.rows()), -1);
  for (Index i = 0; i < z.rows(); ++i) {
    int ones = 0;
    for (Index k = 0; k < z.cols(); ++k) {
      if (z(i, k) == 1.0) {
        ++ones;
        ids[static_cast<std::size_t>(i)] = static_cast<int>(k);
      } else if (z(i, k) != 0.0) {
        throw ValidationError("membership matrix entries must be 0 or 1");
      }
    }
    if (ones != 1) {
      std::ostringstream msg;
      msg << "membership row " << i + 1 << " has row sum " << ones;
      throw ValidationError(msg.str());
    }
  }
  return CommunityLabels(std::move(ids), static_cast<int>(z.cols()));
}

inline CommunityLabels membership_to_labels(const MembershipMatrix& z) {
  return membership_to_labels(z.matrix());
}

/// Divides P by its largest absolute entry. Validation never rescales on its
/// own, since that would silently change the meaning of rho.
inline Matrix normalize_P(const Matrix& p) {
  const double m = max_abs(p);
  if (m == 0.0) throw ValidationError("cannot normalize an all-zero P");
  return p / m;
}

/// Symmetric K x K connectivity matrix with max |entry| = 1 and rank K0.
class ConnectivityMatrix {
 public:
  static constexpr double kNormTolerance = 1e-12;
  static constexpr double kNearDeficientRatio = 1e-6;

  ConnectivityMatrix(Matrix p, int k0) : p_(std::move(p)), k0_(k0) {
    if (p_.rows() != p_.cols() || p_.rows() == 0) {
      throw ValidationError("P must be a non-empty square matrix");
    }
    for (Index j = 0; j < p_.cols(); ++j) {
      for (Index i = j + 1; i < p_.rows(); ++i) {
        if (std::abs(p_(i, j) - p_(j, i)) > kNormTolerance) {
          throw ValidationError("P must be symmetric");
        }
      }
    }
    if (std::abs(max_abs(p_) - 1.0) > kNormTolerance) {
      std::ostringstream msg;
      msg << "max |P(k,l)| must equal 1, got " << max_abs(p_)
          << " (see normalize_P)";
      throw ValidationError(msg.str());
    }
    if (k0_ < 1 || k0_ > p_.rows()) {
      throw ValidationError("K0 must satisfy 1 <= K0 <= K");
    }
    singular_values_ = dfm::singular_values(p_);
    const int rank = numerical_rank(singular_values_);
    if (rank != k0_) {
      std::ostringstream msg;
      msg << "numerical rank of P is " << rank << ", declared K0 = " << k0_;
      throw ValidationError(msg.str());
    }
  }

  const Matrix& matrix() const { return p_; }
  int k() const { return static_cast<int>(p_.rows()); }
  int k0() const { return k0_; }
  double operator()(Index k, Index l) const { return p_(k, l); }

  /// sigma_{K0}(P), the separation parameter.
  double sigma_k0() const { return singular_values_(k0_ - 1); }
  const Vector& singular_values() const { return singular_values_; }

  /// Accepted but tiny sigma_{K0}(P) relative to sigma_1(P).
  bool near_rank_deficient() const {
    return sigma_k0() < kNearDeficientRatio * singular_values_(0);
  }

  double min_entry() const { return p_.minCoeff(); }
  double max_entry() const { return p_.maxCoeff(); }

 private:
  Matrix p_;
  int k0_;
  Vector singular_values_;
};

struct SizeSummary {
  std::vector<Index> sizes;  // n_1..n_K
  Index n_min = 0;
  Index n_max = 0;
  Index n_k0 = 0;  // K0-th largest size
};

inline SizeSummary community_sizes(const CommunityLabels& labels, int k0) {
  SizeSummary out;
  out.sizes = labels.sizes();
  if (k0 < 1 || k0 > labels.k()) {
    throw ValidationError("K0 must satisfy 1 <= K0 <= K");
  }
  auto sorted = out.sizes;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  out.n_max = sorted.front();
  out.n_min = sorted.back();
  out.n_k0 = sorted[static_cast<std::size_t>(k0 - 1)];
  return out;
}

inline SizeSummary community_sizes(const MembershipMatrix& z, int k0) {
  return community_sizes(membership_to_labels(z), k0);
}

/// Full parameter set (n, K, K0, rho, P, Z).
class ModelSpec {
 public:
  ModelSpec(ConnectivityMatrix p, CommunityLabels labels, double rho)
      : p_(std::move(p)), labels_(std::move(labels)), rho_(rho) {
    if (!(rho_ > 0.0) || !std::isfinite(rho_)) {
      throw ValidationError("rho must be a positive finite number");
    }
    if (labels_.k() != p_.k()) {
      throw ValidationError("labels and P disagree on K");
    }
    if (labels_.size() < static_cast<std::size_t>(p_.k())) {
      throw ValidationError("K must not exceed n");
    }
    if (!labels_.covers_all()) {
      throw ValidationError("every community must be non-empty (rank(Z) = K)");
    }
  }

  Index n() const { return static_cast<Index>(labels_.size()); }
  int k() const { return p_.k(); }
  int k0() const { return p_.k0(); }
  double rho() const { return rho_; }
  const ConnectivityMatrix& connectivity() const { return p_; }
  const CommunityLabels& labels() const { return labels_; }
  MembershipMatrix membership() const { return labels_to_membership(labels_); }
  SizeSummary sizes() const { return community_sizes(labels_, k0()); }

  ModelSpec with_rho(double rho) const { return ModelSpec(p_, labels_, rho); }

 private:
  ConnectivityMatrix p_;
  CommunityLabels labels_;
  double rho_;
};

/// Dense n x n expectation matrix Omega.
struct PopulationMatrix {
  Matrix omega;
  double rho = 0.0;
  int k0 = 0;
};

inline PopulationMatrix build_omega(const ModelSpec& spec) {
  const Index n = spec.n();
  const auto& labels = spec.labels();
  const auto& p = spec.connectivity().matrix();
  Matrix omega(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      omega(i, j) = spec.rho() * p(labels[static_cast<std::size_t>(i)],
                                   labels[static_cast<std::size_t>(j)]);
    }
  }
  return {std::move(omega), spec.rho(), spec.k0()};
}

/// One node per community, ordered by community id; the smallest node index
/// is chosen in each community.
using IndexSet = std::vector<Index>;

inline IndexSet canonical_index_set(const CommunityLabels& labels) {
  IndexSet out(static_cast<std::size_t>(labels.k()), -1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& slot = out[static_cast<std::size_t>(labels[i])];
    if (slot < 0) slot = static_cast<Index>(i);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] < 0) {
      throw ValidationError("empty community " + std::to_string(k + 1));
    }
  }
  return out;
}

inline IndexSet canonical_index_set(const MembershipMatrix& z) {
  return canonical_index_set(membership_to_labels(z));
}

/// Omega(I, I) / rho, which equals P when Z(I, :) is the identity.
inline Matrix recover_connectivity(const Matrix& omega, const IndexSet& index,
                                   double rho) {
  const auto k = static_cast<Index>(index.size());
  Matrix p(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      p(a, b) = omega(index[static_cast<std::size_t>(a)],
                      index[static_cast<std::size_t>(b)]) / rho;
    }
  }
  return p;
}

}  // namespace dfm
