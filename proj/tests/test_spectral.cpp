#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dfm;

namespace {

Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) m(i, j) = m(j, i) = normal(rng);
  }
  return m;
}

double wcss_of(const Matrix& rows, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    Vector center = Vector::Zero(rows.cols());
    int count = 0;
    for (Index i = 0; i < rows.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        center += rows.row(i).transpose();
        ++count;
      }
    }
    if (count == 0) continue;
    center /= count;
    for (Index i = 0; i < rows.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        total += (rows.row(i).transpose() - center).squaredNorm();
      }
    }
  }
  return total;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b, int k) {
  return oracle::brute_mismatches(a, b, k) == 0;
}

ModelSpec block_spec(std::vector<int> one_based, Matrix p, double rho, int k0) {
  const int k = static_cast<int>(p.rows());
  return ModelSpec(ConnectivityMatrix(std::move(p), k0),
                   CommunityLabels::from_one_based(one_based, k), rho);
}

}  // namespace

TEST(TopEigs, DiagonalMagnitudeOrder) {
  const Matrix s = Vector{{5, -3, 1}}.asDiagonal();
  const auto eig = top_eigs(s, 2);
  EXPECT_NEAR(eig.lambda(0), 5.0, 1e-12);
  EXPECT_NEAR(eig.lambda(1), -3.0, 1e-12);
  EXPECT_NEAR(std::abs(eig.u(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(eig.u(1, 1)), 1.0, 1e-12);
}

TEST(TopEigs, IdentityResidual) {
  const auto eig = top_eigs(Matrix::Identity(3, 3), 1);
  EXPECT_NEAR(eig.lambda(0), 1.0, 1e-12);
  EXPECT_NEAR(eig.u.col(0).norm(), 1.0, 1e-12);
  EXPECT_NEAR((Matrix::Identity(3, 3) * eig.u - eig.u).norm(), 0.0, 1e-12);
}

TEST(TopEigs, TwoOnesBlocks) {
  const auto spec = block_spec({1, 1, 1, 2, 2, 2}, Matrix::Identity(2, 2), 1.0, 2);
  const auto eig = top_eigs(build_omega(spec).omega, 2);
  EXPECT_NEAR(eig.lambda(0), 3.0, 1e-10);
  EXPECT_NEAR(eig.lambda(1), 3.0, 1e-10);
}

TEST(TopEigs, MatchesJacobiOracle) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 25; ++t) {
    const Index n = 2 + t % 12;
    const Matrix s = random_symmetric(n, rng);
    const Vector reference = oracle::jacobi_eigenvalues(s);
    const Vector ours = eigenvalues_by_magnitude(s);
    ASSERT_EQ(ours.size(), n);
    EXPECT_LT((ours - reference).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, reference.cwiseAbs().maxCoeff()));
    const int k0 = static_cast<int>(1 + t % n);
    const auto eig = top_eigs(s, k0);
    EXPECT_LT((eig.u.transpose() * eig.u - Matrix::Identity(k0, k0)).norm(), 1e-10);
    EXPECT_LT((s * eig.u - eig.u * eig.lambda.asDiagonal()).norm(), 1e-9 * std::max(1.0, s.norm()));
    for (int c = 0; c < k0; ++c) EXPECT_NEAR(eig.lambda(c), reference(c), 1e-9);
  }
}

TEST(TopEigs, Rejects) {
  EXPECT_THROW(top_eigs(Matrix{{0, 1}, {0, 0}}, 1), ValidationError);
  EXPECT_THROW(top_eigs(Matrix::Identity(3, 3), 0), ValidationError);
  EXPECT_THROW(top_eigs(Matrix::Identity(3, 3), 4), ValidationError);
  EXPECT_THROW(top_eigs(Matrix::Zero(2, 3), 1), ValidationError);
}

TEST(SpectralNorm, AgreesWithSingularValues) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Matrix s = random_symmetric(9, rng);
    EXPECT_NEAR(symmetric_spectral_norm(s), singular_values(s)(0), 1e-10);
  }
}

TEST(KMeans, RepeatedOneHotRows) {
  Matrix rows(12, 3);
  std::vector<int> truth;
  for (Index i = 0; i < 12; ++i) {
    rows.row(i) = Matrix::Identity(3, 3).row(i % 3);
    truth.push_back(static_cast<int>(i % 3));
  }
  const auto res = kmeans(rows, 3, KMeansConfig{});
  EXPECT_TRUE(same_partition(res.labels, truth, 3));
  EXPECT_NEAR(res.wcss, 0.0, 1e-15);
  EXPECT_FALSE(res.degenerate);
}

TEST(KMeans, FourPointsMatchEnumeration) {
  const Matrix rows{{0, 0}, {0.1, 0}, {10, 0}, {10.1, 0}};
  // Oracle: every assignment of 4 points into 2 non-empty clusters.
  double best = 1e300;
  std::vector<int> best_labels;
  for (int mask = 1; mask < 15; ++mask) {
    std::vector<int> labels(4);
    for (int i = 0; i < 4; ++i) labels[static_cast<std::size_t>(i)] = (mask >> i) & 1;
    const double w = wcss_of(rows, labels, 2);
    if (w < best) {
      best = w;
      best_labels = labels;
    }
  }
  EXPECT_TRUE(same_partition(best_labels, {0, 0, 1, 1}, 2));
  const auto res = kmeans(rows, 2, KMeansConfig{});
  EXPECT_TRUE(same_partition(res.labels, {0, 0, 1, 1}, 2));
  EXPECT_NEAR(res.wcss, best, 1e-12);
}

TEST(KMeans, IdenticalRowsAreDegenerate) {
  const Matrix rows = Matrix::Ones(5, 2);
  const auto res = kmeans(rows, 2, KMeansConfig{});
  EXPECT_TRUE(res.degenerate);
  EXPECT_EQ(res.labels.size(), 5u);
  EXPECT_NEAR(res.wcss, 0.0, 1e-15);
}

TEST(KMeans, WcssTraceNonIncreasing) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix rows(60, 2);
  for (Index i = 0; i < rows.size(); ++i) rows.data()[i] = normal(rng);
  const auto res = kmeans(rows, 4, KMeansConfig{});
  for (std::size_t i = 1; i < res.wcss_trace.size(); ++i) {
    EXPECT_LE(res.wcss_trace[i], res.wcss_trace[i - 1] + 1e-12);
  }
  EXPECT_NEAR(res.wcss, wcss_of(rows, res.labels, 4), 1e-9);
}

TEST(KMeans, SeededAndReproducible) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix rows(40, 3);
  for (Index i = 0; i < rows.size(); ++i) rows.data()[i] = normal(rng);
  KMeansConfig cfg;
  cfg.rng = RandomStream{5, 0};
  EXPECT_EQ(kmeans(rows, 3, cfg).labels, kmeans(rows, 3, cfg).labels);
}

TEST(KMeans, RejectsBadConfig) {
  KMeansConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(kmeans(Matrix::Ones(3, 1), 2, cfg), ValidationError);
  EXPECT_THROW(kmeans(Matrix::Ones(1, 1), 2, KMeansConfig{}), ValidationError);
}

TEST(Dfa, PopulationInputRecoversLabels) {
  const auto spec = block_spec({1, 1, 1, 2, 2, 2}, Matrix{{1, 0.2}, {0.2, 0.8}}, 1.0, 2);
  const auto est = dfa(build_omega(spec).omega, 2, 2, KMeansConfig{});
  EXPECT_EQ(hamming_error(spec.labels(), est), 0.0);
}

TEST(Dfa, RankDeficientConnectivity) {
  Matrix p{{1, 0.2, 0}, {0.2, 0.6, 0}, {0, 0, 0}};
  p.row(2) = p.row(0) + p.row(1);
  p.col(2) = p.col(0) + p.col(1);
  p(2, 2) = p(0, 0) + 2 * p(0, 1) + p(1, 1);
  p = normalize_P(p);
  std::vector<int> ids;
  for (int i = 0; i < 30; ++i) ids.push_back(1 + i % 3);
  const auto spec = block_spec(ids, p, 0.7, 2);
  const auto omega = build_omega(spec);
  const auto eig = top_eigs(omega.omega, 2);
  EXPECT_EQ(eig.u.cols(), 2);
  const auto est = ideal_dfa(omega, 3, 2, KMeansConfig{});
  EXPECT_EQ(hamming_error(spec.labels(), est), 0.0);
}

TEST(Dfa, IdealOnSignedExperimentSpec) {
  const Matrix p{{-1, -0.4, 0.5}, {-0.4, 0.9, 0.2}, {0.5, 0.2, 0.8}};
  const ModelSpec spec(ConnectivityMatrix(p, 3), sample_labels(200, 3, RandomStream{}), 0.4);
  const auto est = ideal_dfa(build_omega(spec), 3, 3, KMeansConfig{});
  EXPECT_EQ(hamming_error(spec.labels(), est), 0.0);
}

TEST(Dfa, IdentityMembershipIsTrivial) {
  std::mt19937_64 rng(4);
  const Matrix p = oracle::random_connectivity(4, 4, rng);
  const ModelSpec spec(ConnectivityMatrix(p, 4), CommunityLabels({0, 1, 2, 3}, 4), 1.0);
  EXPECT_EQ(hamming_error(spec.labels(), ideal_dfa(build_omega(spec), 4, 4, KMeansConfig{})), 0.0);
}

TEST(Dfa, RandomSpecsExact) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const int k = 2 + t % 3;
    const int k0 = k - (t / 3) % 2;
    const auto spec = oracle::random_spec(k, k0, 20 + 3 * t, rng);
    const auto est = ideal_dfa(build_omega(spec), k, k0, KMeansConfig{});
    EXPECT_EQ(hamming_error(spec.labels(), est), 0.0) << "trial " << t;
  }
}

TEST(Dfa, Rejects) {
  EXPECT_THROW(dfa(Matrix::Identity(3, 3), 2, 3, KMeansConfig{}), ValidationError);
  EXPECT_THROW(dfa(Matrix::Identity(3, 3), 4, 2, KMeansConfig{}), ValidationError);
}
