#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sae_info/errors.hpp"
#include "sae_info/renyi_estimator.hpp"
#include "test_util.hpp"

using namespace sae_info;

namespace {

// Points far enough apart that the Gram matrix is the identity to double precision.
NPDMatrix identity_npd(int n) {
  Matrix x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = 100.0 * i;
  return npd_from_batch(x, 1.0);
}

}  // namespace

TEST(Renyi, IdentityOverNGivesLogN) {
  const EntropyValue h = entropy_alpha(identity_npd(8), kDefaultAlpha);
  EXPECT_NEAR(h.bits, 3.0, 1e-9);
  EXPECT_EQ(h.n, 8);
  EXPECT_NEAR(shannon_limit(identity_npd(8)).bits, 3.0, 1e-9);
}

TEST(Renyi, IdenticalSamplesGiveZero) {
  const Matrix x = Matrix::Constant(6, 3, 0.4);
  EXPECT_NEAR(entropy_alpha(npd_from_batch(x, 0.5), 1.01).bits, 0.0, 1e-9);
}

TEST(Renyi, TwoClustersGiveOneBit) {
  Vector spectrum(4);
  spectrum << 0.5, 0.5, 0.0, 0.0;
  EXPECT_NEAR(renyi_bits_from_spectrum(spectrum, 1.01), 1.0, 1e-12);
  EXPECT_NEAR(shannon_bits_from_spectrum(spectrum), 1.0, 1e-12);

  Matrix x(4, 1);
  x << 0, 0, 100, 100;
  EXPECT_NEAR(entropy_alpha(npd_from_batch(x, 1.0), 1.01).bits, 1.0, 1e-9);
}

TEST(Renyi, OrderTwoMatchesFrobeniusIdentity) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  EXPECT_NEAR(entropy_alpha(npd_from_batch(x, 1.0), 2.0).bits, 0.997389788667725, 1e-12);
}

TEST(Renyi, ApproachesShannonLimit) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const NPDMatrix a = fixtures::random_npd(40, seed);
    const double s = shannon_limit(a).bits;
    EXPECT_NEAR(entropy_alpha(a, 1.0001).bits, s, 1e-3);
    EXPECT_NEAR(entropy_alpha(a, 0.9999).bits, s, 1e-3);
  }
}

TEST(Renyi, BoundedByLogN) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NPDMatrix a = fixtures::random_npd(30, seed);
    const double h = entropy_alpha(a, kDefaultAlpha).bits;
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(30.0) + 1e-9);
  }
}

TEST(Renyi, RejectsInvalidAlpha) {
  const NPDMatrix a = identity_npd(4);
  EXPECT_THROW(entropy_alpha(a, 1.0), ConfigError);
  EXPECT_THROW(entropy_alpha(a, 0.0), ConfigError);
  EXPECT_THROW(entropy_alpha(a, -2.0), ConfigError);
}

TEST(JointEntropy, SubadditiveAndAboveMarginals) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const NPDMatrix a = fixtures::random_npd(30, seed);
    const NPDMatrix b = fixtures::random_npd(30, seed + 500);
    const double ha = entropy_alpha(a, kDefaultAlpha).bits;
    const double hb = entropy_alpha(b, kDefaultAlpha).bits;
    const double hab = joint_entropy(a, b, kDefaultAlpha).bits;
    EXPECT_LE(hab, ha + hb + 1e-9);
    EXPECT_GE(hab, std::max(ha, hb) - 1e-9);
  }
}

TEST(MutualInformation, SymmetricAndNonNegative) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const NPDMatrix a = fixtures::random_npd(20, seed);
    const NPDMatrix b = fixtures::random_npd(20, seed + 7919);
    const double ab = mutual_information(a, b, kDefaultAlpha).bits;
    const double ba = mutual_information(b, a, kDefaultAlpha).bits;
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_GE(ab, -1e-9);
  }
}

TEST(MutualInformation, ConstantVariableCarriesNothing) {
  const NPDMatrix a = fixtures::random_npd(25, 3);
  const NPDMatrix c = npd_from_batch(Matrix::Constant(25, 2, 1.0), 1.0);
  EXPECT_NEAR(mutual_information(a, c, 1.01).bits, 0.0, 1e-9);
}

TEST(MutualInformation, IndependentNormalsNearZero) {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix x = fixtures::random_batch(100, 1, seed);
    const Matrix y = fixtures::random_batch(100, 1, seed + 100);
    const double sx = KernelConfig{}.sigma_for(100, 1);
    total += mutual_information(npd_from_batch(x, sx), npd_from_batch(y, sx), kDefaultAlpha).bits;
  }
  EXPECT_LT(total / 20.0, 0.15);
}

TEST(Entropy, InvariantUnderSamplePermutation) {
  const Matrix x = fixtures::random_batch(40, 3, 5);
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  Matrix y(40, 3);
  for (int i = 0; i < 40; ++i) y.row(i) = x.row(perm[i]);
  EXPECT_NEAR(entropy_alpha(npd_from_batch(x, 1.0), 1.01).bits,
              entropy_alpha(npd_from_batch(y, 1.0), 1.01).bits, 1e-9);
}

TEST(Entropy, DecreasesWithKernelWidth) {
  const Matrix x = fixtures::random_batch(50, 3, 8);
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    const double h = entropy_alpha(npd_from_batch(x, sigma), 1.01).bits;
    EXPECT_LT(h, prev);
    prev = h;
  }
}

TEST(Parzen, ThreePointLine) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  EXPECT_NEAR(parzen_quadratic_entropy(x, 1.0), 1.538347618315765, 1e-12);
}

TEST(Parzen, IdenticalSamplesClosedForm) {
  const Matrix x = Matrix::Constant(7, 1, 2.5);
  EXPECT_NEAR(parzen_quadratic_entropy(x, 0.7), 0.9088371795459128, 1e-12);
}
