#include <gtest/gtest.h>

#include "support.hpp"

using namespace ucfactor;
using namespace ucfactor::testing;

namespace {

TEST(BrutePietsch, Identity) {
  for (std::size_t r : {8u, 100u, 2000u})
    EXPECT_NEAR(oracle::brute_pietsch(DenseMatrix::Identity(2, 2), r), 2.0, 2.0 / r);
}

TEST(BrutePietsch, RankOneEqualsSquaredL1Norm) {
  const HVector phi = cvec({1.0, Complex(0.0, 2.0), -0.5});
  const DenseMatrix g = (phi * phi.adjoint()).conjugate();
  const double l1 = phi.cwiseAbs().sum();
  EXPECT_NEAR(oracle::brute_pietsch(g, 2000), l1 * l1, 3.0 / 2000 * l1 * l1);
  EXPECT_NEAR(oracle::brute_pietsch(DenseMatrix::Ones(2, 2), 2000), 4.0, 3.0 / 2000 * 4.0);
}

TEST(BrutePietsch, SymmetricTwoByTwo) {
  DenseMatrix g(2, 2);
  g << 1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0;
  const double want = 2.0 + std::sqrt(2.0);
  EXPECT_NEAR(oracle::brute_pietsch(g, 2000), want, 3.0 / 2000 * want);
}

TEST(BrutePietsch, UpperBoundMonotoneInResolution) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_sequence(2 + t % 2, 2, rng);
    const DenseMatrix g = gram(s);
    const double opt = min_dominating_diagonal(g).pi2_sq;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t r : {4u, 16u, 64u, 256u, 1024u}) {
      const double v = oracle::brute_pietsch(g, r);
      EXPECT_LE(v, previous);
      EXPECT_GE(v, opt * (1.0 - 1e-12));
      previous = v;
    }
  }
}

TEST(BrutePietsch, Errors) {
  EXPECT_THROW(oracle::brute_pietsch(DenseMatrix::Identity(4, 4), 10), PreconditionError);
  EXPECT_THROW(oracle::brute_pietsch(DenseMatrix::Identity(2, 3), 10), DimensionError);
  EXPECT_THROW(oracle::brute_pietsch(DenseMatrix::Identity(2, 2), 0), PreconditionError);
}

TEST(BruteSignNorm, Examples) {
  EXPECT_NEAR(oracle::brute_sign_norm(seq({e(2, 0), e(2, 0)})), 2.0, 1e-15);
  EXPECT_NEAR(oracle::brute_sign_norm(seq({e(2, 0), -e(2, 0)})), 2.0, 1e-15);
  EXPECT_NEAR(oracle::brute_sign_norm(seq({e(2, 0), e(2, 1), e(2, 0) + e(2, 1)})),
              2.0 * std::sqrt(2.0), 1e-15);
}

TEST(BruteSignNorm, EqualsExactC0Norm) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 60; ++t) {
    const auto s = random_sequence(1 + t % 12, 1 + t % 4, rng);
    const double brute = oracle::brute_sign_norm(s);
    EXPECT_NEAR(c0_operator_norm(s), brute, 1e-12 * brute);
  }
  EXPECT_THROW(oracle::brute_sign_norm(random_sequence(21, 1, rng)), PreconditionError);
}

TEST(DualValue, Examples) {
  const auto a = oracle::dual_value(DenseMatrix::Identity(2, 2), DenseMatrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(a.value, 2.0);
  EXPECT_TRUE(a.feasible);
  const auto b = oracle::dual_value(DenseMatrix::Ones(2, 2), DenseMatrix::Ones(2, 2));
  EXPECT_DOUBLE_EQ(b.value, 4.0);
  EXPECT_TRUE(b.feasible);
  DenseMatrix x = DenseMatrix::Identity(2, 2);
  x(0, 0) = 2.0;
  const auto c = oracle::dual_value(DenseMatrix::Identity(2, 2), x);
  EXPECT_FALSE(c.feasible);
  EXPECT_DOUBLE_EQ(c.max_diag_defect, 1.0);
  DenseMatrix neg = DenseMatrix::Ones(2, 2);
  neg(0, 1) = neg(1, 0) = 3.0;
  EXPECT_FALSE(oracle::dual_value(DenseMatrix::Identity(2, 2), neg).feasible);
  EXPECT_THROW(oracle::dual_value(DenseMatrix::Identity(2, 2), DenseMatrix::Identity(3, 3)),
               DimensionError);
}

TEST(DualValue, CertificatesPairToPrimalMinusGap) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 40; ++t) {
    const DenseMatrix g = gram(random_sequence(1 + t % 9, 1 + t % 4, rng));
    const auto s = min_dominating_diagonal(g);
    const auto d = oracle::dual_value(g, s.dualX);
    EXPECT_TRUE(d.feasible);
    EXPECT_GE(d.value, s.pi2_sq - s.gap - 1e-12 * std::max(1.0, s.pi2_sq));
  }
}

TEST(RandomFactorizationCost, Examples) {
  EXPECT_GE(oracle::random_factorization_cost(seq({e(2, 0), e(2, 1)}), 100, 1), 2.0 - 1e-8);
  EXPECT_GE(oracle::random_factorization_cost(seq({e(2, 0), e(2, 0)}), 100, 1), 4.0 - 1e-8);
  EXPECT_EQ(oracle::random_factorization_cost(seq({e(2, 0)}), 0, 1),
            std::numeric_limits<double>::infinity());
}

TEST(RandomFactorizationCost, DeterministicAndAboveOptimum) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_sequence(2 + t % 5, 2, rng);
    const double opt = factorize(s).cost;
    const double a = oracle::random_factorization_cost(s, 500, 7);
    EXPECT_EQ(a, oracle::random_factorization_cost(s, 500, 7));
    EXPECT_GE(a, opt - 1e-8);
  }
}

}  // namespace
