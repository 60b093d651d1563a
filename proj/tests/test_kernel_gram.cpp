#include <cmath>

#include <gtest/gtest.h>

#include "sae_info/errors.hpp"
#include "sae_info/kernel_gram.hpp"
#include "test_util.hpp"

using namespace sae_info;

TEST(Silverman, KnownValue) {
  EXPECT_NEAR(silverman_sigma(100, 2, 6.0), 2.7849533001676674, 1e-12);
}

TEST(Silverman, ShrinksWithBatchSizeGrowsWithDimension) {
  for (int d = 1; d < 50; ++d) {
    EXPECT_LT(silverman_sigma(200, d, 1.0), silverman_sigma(100, d, 1.0));
    EXPECT_LT(silverman_sigma(100, d, 1.0), silverman_sigma(100, d + 1, 1.0));
  }
  EXPECT_NEAR(silverman_sigma(100, 100000, 6.0), 6.0, 1e-3);
}

TEST(Silverman, RejectsBadArguments) {
  EXPECT_THROW(silverman_sigma(1, 2, 1.0), ConfigError);
  EXPECT_THROW(silverman_sigma(10, 0, 1.0), ConfigError);
  EXPECT_THROW(silverman_sigma(10, 2, 0.0), ConfigError);
}

TEST(KernelConfig, OverrideWins) {
  KernelConfig c;
  c.sigma_override = 0.25;
  EXPECT_EQ(c.sigma_for(100, 7), 0.25);
  c.sigma_override.reset();
  c.h = 2.0;
  EXPECT_DOUBLE_EQ(c.sigma_for(100, 2), silverman_sigma(100, 2, 2.0));
}

TEST(GramGaussian, ThreePointLine) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  const Matrix k = gram_gaussian(x, 1.0);
  EXPECT_EQ(k(0, 0), 1.0);
  EXPECT_NEAR(k(0, 1), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(k(0, 2), std::exp(-2.0), 1e-15);
  EXPECT_EQ(k, k.transpose());
}

TEST(GramGaussian, Errors) {
  Matrix x = fixtures::random_batch(4, 2, 1);
  EXPECT_THROW(gram_gaussian(x, 0.0), ConfigError);
  EXPECT_THROW(gram_gaussian(x.topRows(1), 1.0), ConfigError);
  x(2, 1) = std::nan("");
  EXPECT_THROW(gram_gaussian(x, 1.0), DataError);
}

TEST(GramGaussian, TranslationInvariant) {
  const Matrix x = fixtures::random_batch(30, 4, 2);
  Matrix shifted = x;
  shifted.rowwise() += Eigen::RowVector4d(3.0, -1.0, 0.5, 7.0);
  EXPECT_TRUE(gram_gaussian(x, 1.1).isApprox(gram_gaussian(shifted, 1.1), 1e-12));
}

TEST(NormalizeGram, UnitTraceConstantDiagonal) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NPDMatrix a = fixtures::random_npd(10 + seed, seed);
    const double n = static_cast<double>(a.n());
    EXPECT_NEAR(a.entries().trace(), 1.0, 1e-12);
    for (Eigen::Index i = 0; i < a.n(); ++i) EXPECT_DOUBLE_EQ(a.entries()(i, i), 1.0 / n);
    EXPECT_GT(fixtures::min_eigenvalue(a.entries()), -1e-12);
  }
}

TEST(NormalizeGram, Errors) {
  EXPECT_THROW(normalize_gram(Matrix::Ones(3, 2)), ShapeError);
  Matrix k = Matrix::Identity(3, 3);
  k(1, 1) = 0.0;
  EXPECT_THROW(normalize_gram(k), DataError);
}

TEST(HadamardJoint, PsdUnitTraceAndSymmetric) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const NPDMatrix a = fixtures::random_npd(25, seed);
    const NPDMatrix b = fixtures::random_npd(25, seed + 1000);
    const NPDMatrix ab = hadamard_joint(a, b);
    EXPECT_NEAR(ab.entries().trace(), 1.0, 1e-12);
    EXPECT_GT(fixtures::min_eigenvalue(ab.entries()), -1e-12);
    EXPECT_TRUE(ab.entries().isApprox(hadamard_joint(b, a).entries(), 1e-15));
  }
}

TEST(HadamardJoint, SizeMismatch) {
  EXPECT_THROW(hadamard_joint(fixtures::random_npd(5, 1), fixtures::random_npd(6, 2)), ShapeError);
}
