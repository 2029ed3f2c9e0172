#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dfm;

namespace {

CommunityLabels one_based(std::vector<int> ids, int k) {
  return CommunityLabels::from_one_based(ids, k);
}

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(Labels, IdentityMembership) {
  const auto z = labels_to_membership(one_based({1, 2}, 2));
  EXPECT_EQ(z.matrix(), Matrix::Identity(2, 2));
}

TEST(Labels, OneHotColumnSums) {
  const auto z = labels_to_membership(one_based({1, 1, 2, 2, 3}, 3));
  ASSERT_EQ(z.n(), 5);
  ASSERT_EQ(z.k(), 3);
  const Vector sums = z.matrix().colwise().sum().transpose();
  EXPECT_EQ(sums, (Vector(3) << 2, 2, 1).finished());
  EXPECT_EQ(z.matrix().rowwise().sum(), Vector::Ones(5));
}

TEST(Labels, EmptyCommunityRejected) {
  try {
    labels_to_membership(one_based({1, 1, 1}, 2));
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(Labels, OutOfRangeRejected) {
  EXPECT_THROW(one_based({1, 3}, 2), ValidationError);
  EXPECT_THROW(one_based({0, 1}, 2), ValidationError);
  EXPECT_THROW(CommunityLabels({0}, 0), ValidationError);
}

TEST(Labels, MembershipReadBack) {
  EXPECT_EQ(membership_to_labels(Matrix::Identity(2, 2)).to_one_based(),
            (std::vector<int>{1, 2}));
  EXPECT_EQ(membership_to_labels(mat({{0, 1}, {0, 1}, {1, 0}})).to_one_based(),
            (std::vector<int>{2, 2, 1}));
  EXPECT_THROW(membership_to_labels(mat({{1, 1}})), ValidationError);
}

TEST(Labels, MembershipMatrixValidates) {
  EXPECT_THROW(MembershipMatrix(mat({{1, 0}, {0.5, 0.5}})), ValidationError);
  EXPECT_THROW(MembershipMatrix(mat({{1, 0}, {1, 0}})), ValidationError);
  EXPECT_NO_THROW(MembershipMatrix(mat({{1, 0}, {0, 1}})));
}

TEST(Labels, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto labels = oracle::random_labels(15, 4, rng);
    EXPECT_EQ(membership_to_labels(labels_to_membership(labels)), labels);
  }
}

TEST(Connectivity, Validation) {
  EXPECT_NO_THROW(ConnectivityMatrix(mat({{1, 0.4}, {0.4, 0.9}}), 2));
  EXPECT_THROW(ConnectivityMatrix(mat({{1, 0.4}, {0.3, 0.9}}), 2), ValidationError);
  EXPECT_THROW(ConnectivityMatrix(mat({{0.5, 0.4}, {0.4, 0.9}}), 2), ValidationError);
  EXPECT_THROW(ConnectivityMatrix(mat({{1, 1}, {1, 1}}), 2), ValidationError);
  EXPECT_NO_THROW(ConnectivityMatrix(mat({{1, 1}, {1, 1}}), 1));
  EXPECT_THROW(ConnectivityMatrix(mat({{1, 0.4}, {0.4, 0.9}}), 3), ValidationError);
}

TEST(Connectivity, NegativeEntriesAllowed) {
  const ConnectivityMatrix p(mat({{-1, -0.4, 0.5}, {-0.4, 0.9, 0.2}, {0.5, 0.2, 0.8}}), 3);
  EXPECT_DOUBLE_EQ(p.min_entry(), -1.0);
  EXPECT_GT(p.sigma_k0(), 0.0);
}

TEST(Connectivity, NormalizeScalesToUnitMax) {
  const Matrix p = normalize_P(mat({{2, -4}, {-4, 1}}));
  EXPECT_DOUBLE_EQ(max_abs(p), 1.0);
  EXPECT_DOUBLE_EQ(p(0, 1), -1.0);
  EXPECT_THROW(normalize_P(Matrix::Zero(2, 2)), ValidationError);
}

TEST(Omega, IdentityMembershipGivesRhoP) {
  const ModelSpec spec(ConnectivityMatrix(mat({{1, 0.4}, {0.4, 0.9}}), 2), one_based({1, 2}, 2),
                       0.5);
  const auto omega = build_omega(spec);
  EXPECT_TRUE(omega.omega.isApprox(mat({{0.5, 0.2}, {0.2, 0.45}}), 1e-15));
}

TEST(Omega, DiagonalPGivesBlocks) {
  const ModelSpec spec(ConnectivityMatrix(Matrix::Identity(2, 2), 2), one_based({1, 1, 2}, 2),
                       1.0);
  EXPECT_EQ(build_omega(spec).omega, mat({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
}

TEST(Omega, SignedConnectivityEntry) {
  const Matrix p = mat({{-1, -0.4, 0.5}, {-0.4, 0.9, 0.2}, {0.5, 0.2, 0.8}});
  std::vector<int> ids(200);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i % 3);
  const ModelSpec spec(ConnectivityMatrix(p, 3), CommunityLabels(ids, 3), 0.4);
  const auto omega = build_omega(spec).omega;
  EXPECT_DOUBLE_EQ(omega(0, 3), -0.4);
  EXPECT_DOUBLE_EQ(omega(0, 1), 0.4 * -0.4);
  EXPECT_TRUE(is_symmetric(omega));
}

TEST(Omega, RankEqualsK0) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto spec = oracle::random_spec(4, 2 + t % 3, 40, rng);
    EXPECT_EQ(numerical_rank(build_omega(spec).omega), spec.k0());
  }
}

TEST(ModelSpec, RejectsBadInputs) {
  const ConnectivityMatrix p(Matrix::Identity(2, 2), 2);
  EXPECT_THROW(ModelSpec(p, one_based({1, 2}, 2), 0.0), ValidationError);
  EXPECT_THROW(ModelSpec(p, one_based({1, 2}, 2), -1.0), ValidationError);
  EXPECT_THROW(ModelSpec(p, one_based({1, 1}, 2), 1.0), ValidationError);
  EXPECT_THROW(ModelSpec(p, one_based({1, 2, 3}, 3), 1.0), ValidationError);
  EXPECT_NO_THROW(ModelSpec(p, one_based({1, 2}, 2), 2.5));  // rho > 1 is allowed
}

TEST(Sizes, Examples) {
  const auto a = community_sizes(one_based({1, 1, 1, 1, 1, 2, 2, 2, 3, 3}, 3), 2);
  EXPECT_EQ(a.n_k0, 3);
  EXPECT_EQ(a.n_min, 2);
  EXPECT_EQ(a.n_max, 5);
  EXPECT_EQ(community_sizes(one_based({1, 2, 1, 2, 1, 2, 1, 2}, 2), 2).n_k0, 4);
  const auto c = community_sizes(one_based(std::vector<int>(7, 1), 1), 1);
  EXPECT_EQ(c.n_k0, 7);
  EXPECT_EQ(c.n_min, 7);
  EXPECT_EQ(c.n_max, 7);
}

TEST(IndexSet, FirstOccurrence) {
  EXPECT_EQ(canonical_index_set(one_based({1, 2, 1, 2}, 2)), (IndexSet{0, 1}));
  EXPECT_EQ(canonical_index_set(one_based({2, 2, 1}, 2)), (IndexSet{2, 0}));
  EXPECT_EQ(canonical_index_set(one_based({1}, 1)), (IndexSet{0}));
}

TEST(IndexSet, RecoversConnectivity) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto spec = oracle::random_spec(3, 3, 25, rng);
    const auto omega = build_omega(spec).omega;
    const Matrix p = recover_connectivity(omega, canonical_index_set(spec.labels()), spec.rho());
    EXPECT_TRUE(p.isApprox(spec.connectivity().matrix(), 1e-12));
  }
}
