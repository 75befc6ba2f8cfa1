#include <gtest/gtest.h>

#include "support.hpp"

using namespace ucfactor;
using namespace ucfactor::testing;

namespace {

const Complex I(0.0, 1.0);

TEST(Inner, OrthonormalBasis) {
  EXPECT_EQ(inner(e(2, 0), e(2, 0)), Complex(1.0));
  EXPECT_EQ(inner(e(2, 0), e(2, 1)), Complex(0.0));
}

TEST(Inner, LinearInFirstSlot) {
  const HVector f = (1.0 + I) * e(2, 0);
  EXPECT_EQ(inner(f, e(2, 0)), 1.0 + I);
  EXPECT_EQ(inner(e(2, 0), f), 1.0 - I);
}

TEST(Inner, DimensionMismatchThrows) {
  EXPECT_THROW(inner(e(2, 0), e(3, 0)), DimensionError);
}

TEST(Inner, SelfPairingIsRealNonnegative) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const HVector f = random_vector(4, rng);
    const Complex z = inner(f, f);
    EXPECT_EQ(z.imag(), 0.0);
    EXPECT_GE(z.real(), 0.0);
  }
}

TEST(VectorSequence, RejectsEmptyRaggedAndNonFinite) {
  EXPECT_THROW(VectorSequence(std::vector<HVector>{}), PreconditionError);
  EXPECT_THROW(seq({e(2, 0), e(3, 0)}), DimensionError);
  HVector bad = e(2, 0);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(seq({bad}), PreconditionError);
}

TEST(Synthesis, ColumnsAreTerms) {
  EXPECT_TRUE(synthesis_matrix(seq({e(2, 0), e(2, 1)})).isApprox(DenseMatrix::Identity(2, 2)));
  DenseMatrix ones(2, 2);
  ones << 1, 1, 0, 0;
  EXPECT_EQ(synthesis_matrix(seq({e(2, 0), e(2, 0)})), ones);
  const DenseMatrix a = synthesis_matrix(seq({2.0 * e(2, 0)}));
  ASSERT_EQ(a.cols(), 1);
  EXPECT_EQ(a(0, 0), Complex(2.0));
  EXPECT_EQ(a(1, 0), Complex(0.0));
}

TEST(Gram, Examples) {
  EXPECT_EQ(gram(seq({e(2, 0), e(2, 1)})), DenseMatrix(DenseMatrix::Identity(2, 2)));
  EXPECT_EQ(gram(seq({e(2, 0), e(2, 0)})), DenseMatrix(DenseMatrix::Ones(2, 2)));
}

TEST(Gram, MatchesMatrixProductAndIsExactlyHermitian) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_sequence(1 + t % 7, 1 + t % 5, rng);
    const DenseMatrix a = synthesis_matrix(s);
    const DenseMatrix g = gram(s);
    EXPECT_LE((g - a.adjoint() * a).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, g.norm()));
    for (Eigen::Index j = 0; j < g.rows(); ++j)
      for (Eigen::Index k = 0; k < g.cols(); ++k) EXPECT_EQ(g(j, k), std::conj(g(k, j)));
    EXPECT_GE(min_eigenvalue(g), -1e-10 * std::max(1.0, max_eigenvalue(g)));
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(DenseMatrix::Identity(3, 3)), 1.0, 1e-15);
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 1) = 2.0;
  EXPECT_NEAR(spectral_norm(m), 2.0, 1e-15);
}

TEST(SpectralNorm, AgreesWithEigensolveOfGramian) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    DenseMatrix m(4, 4);
    for (Eigen::Index j = 0; j < 4; ++j) m.col(j) = random_vector(4, rng);
    const double oracle = std::sqrt(oracle_top_eigenvalue(m.adjoint() * m));
    EXPECT_NEAR(spectral_norm(m), oracle, 1e-10 * oracle);
  }
}

TEST(BesselBound, Examples) {
  EXPECT_NEAR(bessel_bound(seq({e(2, 0), e(2, 1)})), 1.0, 1e-14);
  EXPECT_NEAR(bessel_bound(seq({e(2, 0), e(2, 0)})), oracle_top_eigenvalue(DenseMatrix::Ones(2, 2)),
              1e-14);
  EXPECT_NEAR(bessel_bound(seq({2.0 * e(2, 0)})), 4.0, 1e-14);
}

TEST(BesselBound, BoundsEveryProbeAndIsAttained) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + t % 9;
    const Eigen::Index d = 1 + t % 4;
    const auto s = random_sequence(n, d, rng);
    const double b = bessel_bound(s);
    for (int p = 0; p < 20; ++p) {
      const HVector f = random_vector(d, rng);
      EXPECT_LE(bessel_sum(s, f), (b + 1e-8) * f.squaredNorm());
    }
    const DenseMatrix a = synthesis_matrix(s);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a * a.adjoint());
    const HVector top = es.eigenvectors().col(d - 1);
    EXPECT_NEAR(bessel_sum(s, top), b, 1e-9 * std::max(1.0, b));
    const double sn = spectral_norm(a);
    EXPECT_NEAR(b, sn * sn, 1e-8 * std::max(1.0, b));
  }
}

TEST(WeakL1Sum, Examples) {
  EXPECT_DOUBLE_EQ(weak_l1_sum(seq({e(2, 0), e(2, 0)}), e(2, 0)), 2.0);
  EXPECT_DOUBLE_EQ(weak_l1_sum(seq({e(2, 0), e(2, 1)}), e(2, 1)), 1.0);
  EXPECT_EQ(weak_l1_sum(seq({e(3, 0), e(3, 1)}), e(3, 2)), 0.0);
  EXPECT_THROW(weak_l1_sum(seq({e(2, 0)}), e(3, 0)), DimensionError);
}

TEST(WeakL1Sum, TermByTermAndDominatedByC0Norm) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto s = random_sequence(1 + t % 10, 1 + t % 4, rng);
    const HVector g = random_unit(s.dim(), rng);
    double direct = 0.0;
    for (const auto& x : s) direct += std::abs(x.dot(g));
    EXPECT_NEAR(weak_l1_sum(s, g), direct, 1e-12 * std::max(1.0, direct));
    // real data: real signs give the exact sup-norm operator norm
    std::vector<HVector> re;
    for (const auto& x : s) re.emplace_back(x.real().cast<Complex>());
    const VectorSequence r(std::move(re));
    const HVector gr = [&] {
      HVector v = random_vector(s.dim(), rng).real().cast<Complex>();
      return HVector(v / v.norm());
    }();
    EXPECT_LE(weak_l1_sum(r, gr), c0_operator_norm(r) + 1e-10);
  }
}

TEST(C0Norm, Examples) {
  EXPECT_NEAR(c0_operator_norm(seq({e(2, 0), e(2, 0)})), 2.0, 1e-15);
  EXPECT_NEAR(c0_operator_norm(seq({e(2, 0), e(2, 1)})), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c0_operator_norm(seq({2.0 * e(2, 0)})), 2.0, 1e-15);
}

TEST(C0Norm, WitnessAttainsValue) {
  const auto s = seq({e(2, 0), -e(2, 0), e(2, 1)});
  const auto r = c0_operator_norm_detailed(s);
  EXPECT_NEAR(r.value, std::sqrt(5.0), 1e-15);
  EXPECT_DOUBLE_EQ(signed_sum_norm(s, r.witness), r.value);
  EXPECT_EQ(r.witness[0], 1);
}

TEST(C0Norm, ExactModeRespectsCap) {
  std::mt19937_64 rng(6);
  const auto s = random_sequence(21, 2, rng);
  EXPECT_THROW(c0_operator_norm(s), EnumerationCapError);
  SignSearch small;
  small.max_enum = 4;
  EXPECT_THROW(c0_operator_norm(random_sequence(5, 2, rng), small), EnumerationCapError);
  SignSearch sampled;
  sampled.mode = NormMode::sampled;
  EXPECT_GT(c0_operator_norm(s, sampled), 0.0);
}

TEST(C0Norm, SampledIsDeterministicMonotoneAndBelowExact) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_sequence(4 + t % 9, 3, rng);
    const double exact = c0_operator_norm(s);
    double previous = 0.0;
    for (std::size_t trials : {0u, 1u, 5u, 50u, 200u}) {
      SignSearch opt;
      opt.mode = NormMode::sampled;
      opt.trials = trials;
      opt.seed = 42;
      const double v = c0_operator_norm(s, opt);
      EXPECT_EQ(v, c0_operator_norm(s, opt));
      EXPECT_GE(v, previous);
      EXPECT_LE(v, exact * (1.0 + 1e-12));
      EXPECT_GE(v * v, bessel_bound(s) * (1.0 - 1e-12));
      previous = v;
    }
  }
}

TEST(C0Norm, GrayCodeVisitsEveryPatternOnce) {
  for (std::size_t n : {1u, 2u, 5u, 9u}) {
    std::set<SignPattern> seen;
    SignPattern prev;
    for_each_sign_pattern_mod_global(n, [&](const SignPattern& eps, std::size_t k) {
      EXPECT_EQ(eps[0], 1);
      if (!prev.empty()) {
        int diff = 0;
        for (std::size_t i = 0; i < n; ++i) diff += eps[i] != prev[i];
        EXPECT_EQ(diff, 1);
        EXPECT_NE(eps[k], prev[k]);
      }
      seen.insert(eps);
      prev = eps;
    });
    EXPECT_EQ(seen.size(), std::size_t{1} << (n - 1));
  }
}

TEST(C0Norm, DominatesSquareRootOfBesselBound) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_sequence(1 + t % 10, 1 + t % 5, rng);
    EXPECT_GE(c0_operator_norm(s), std::sqrt(bessel_bound(s)) - 1e-12);
  }
}

TEST(OrliczSum, Examples) {
  EXPECT_DOUBLE_EQ(orlicz_sum(seq({e(2, 0), e(2, 1)})), 2.0);
  EXPECT_DOUBLE_EQ(orlicz_sum(seq({e(2, 0), e(2, 0)})), 2.0);
  EXPECT_DOUBLE_EQ(orlicz_sum(seq({2.0 * e(2, 0)})), 4.0);
}

TEST(OrliczSum, EqualsTraceOfGram) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_sequence(1 + t % 8, 1 + t % 4, rng);
    const double tr = gram(s).trace().real();
    EXPECT_NEAR(orlicz_sum(s), tr, 1e-12 * tr);
  }
}

TEST(Sequence, AppendingZeroVectorChangesNothing) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_sequence(1 + t % 8, 1 + t % 4, rng);
    const auto z = s.appended(HVector::Zero(s.dim()));
    EXPECT_NEAR(bessel_bound(z), bessel_bound(s), 1e-12 * bessel_bound(s));
    EXPECT_NEAR(c0_operator_norm(z), c0_operator_norm(s), 1e-12 * c0_operator_norm(s));
    EXPECT_EQ(orlicz_sum(z), orlicz_sum(s));
  }
}

TEST(Rng, PortableUniformAndSigns) {
  std::mt19937_64 a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    const double u = uniform01(a);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, uniform01(b));
  }
  EXPECT_EQ(random_signs(70, a), random_signs(70, b));
}

}  // namespace
