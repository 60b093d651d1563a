#include <cmath>

#include <gtest/gtest.h>

#include "sae_info/errors.hpp"
#include "sae_info/sae_trainer.hpp"
#include "test_util.hpp"

using namespace sae_info;

namespace {

const std::vector<int> kSmall = {6, 4, 2, 4, 6};

Matrix unit_batch(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  const Matrix g = fixtures::random_batch(n, d, seed);
  return (1.0 / (1.0 + (-g.array()).exp())).matrix();
}

double loss_only(const SAEModel& m, const Matrix& x) {
  Gradients g;
  return loss_and_gradients(m, x, g);
}

}  // namespace

TEST(BuildSae, ShapesAndActivations) {
  const SAEModel m = build_sae({20, 16, 8, 3, 8, 16, 20}, 4);
  ASSERT_EQ(m.layers.size(), 6u);
  EXPECT_EQ(m.encoder_depth(), 3);
  EXPECT_EQ(m.bottleneck_dim(), 3);
  EXPECT_EQ(m.layers[0].weights.rows(), 20);
  EXPECT_EQ(m.layers[0].weights.cols(), 16);
  EXPECT_EQ(m.layers[2].activation, Activation::kLinear);
  EXPECT_EQ(m.layers[5].activation, Activation::kSigmoid);
  for (const auto& layer : m.layers) {
    const double r = std::sqrt(6.0 / double(layer.weights.rows() + layer.weights.cols()));
    EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), r);
    EXPECT_TRUE(layer.bias.isZero());
  }
}

TEST(BuildSae, RejectsBadTopologies) {
  EXPECT_THROW(build_sae({20, 16, 8, 16}, 1), ConfigError);
  EXPECT_THROW(build_sae({20, 20}, 1), ConfigError);
  EXPECT_THROW(build_sae({20, 8, 3, 9, 20}, 1), ConfigError);
  EXPECT_THROW(build_sae({20, 0, 20}, 1), ConfigError);
}

TEST(BuildSae, DeterministicInSeed) {
  const SAEModel a = build_sae(kSmall, 9);
  const SAEModel b = build_sae(kSmall, 9);
  const SAEModel c = build_sae(kSmall, 10);
  for (std::size_t l = 0; l < a.layers.size(); ++l) EXPECT_EQ(a.layers[l].weights, b.layers[l].weights);
  EXPECT_NE(a.layers[0].weights, c.layers[0].weights);
}

TEST(Forward, ZeroWeightsGiveOneHalf) {
  SAEModel m = build_sae(kSmall, 1);
  for (auto& layer : m.layers) layer.weights.setZero();
  const ActivationSet acts = forward(m, unit_batch(5, 6, 2));
  ASSERT_EQ(acts.size(), 5u);
  EXPECT_TRUE(acts.reconstruction().isApprox(Matrix::Constant(5, 6, 0.5)));
  EXPECT_TRUE(acts.layers[2].isZero());
}

TEST(Forward, LinearBottleneckPassesThrough) {
  SAEModel m = build_sae({2, 2, 2}, 1, Activation::kLinear);
  m.layers[0].weights.setIdentity();
  m.layers[1].weights.setIdentity();
  const Matrix x = fixtures::random_batch(7, 2, 3);
  EXPECT_TRUE(reconstruct(m, x).isApprox(x));
  EXPECT_EQ(reconstruction_mse(m, x), 0.0);
}

TEST(Forward, RejectsWrongWidth) {
  EXPECT_THROW(forward(build_sae(kSmall, 1), Matrix::Zero(3, 5)), ShapeError);
}

TEST(Mse, KnownValues) {
  Matrix a(2, 2), b(2, 2);
  a << 0, 0, 0, 0;
  b << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(mean_squared_error(a, b), 0.5);
  EXPECT_DOUBLE_EQ(mean_squared_error(a, a), 0.0);
  EXPECT_THROW(mean_squared_error(a, Matrix::Zero(2, 3)), ShapeError);
}

TEST(Gradients, MatchFiniteDifferences) {
  for (bool tied : {false, true}) {
    SAEModel m = build_sae({3, 2, 1, 2, 3}, 5);
    for (auto& layer : m.layers) layer.bias.setConstant(0.1);
    if (tied) tie_decoder_weights(m);
    const Matrix x = unit_batch(4, 3, 6);
    Gradients g;
    loss_and_gradients(m, x, g, tied);
    const double eps = 1e-5;
    const std::size_t n = m.layers.size();
    for (std::size_t l = 0; l < n; ++l) {
      if (tied && l >= n / 2) continue;
      for (Eigen::Index i = 0; i < m.layers[l].weights.size(); ++i) {
        SAEModel plus = m, minus = m;
        plus.layers[l].weights.data()[i] += eps;
        minus.layers[l].weights.data()[i] -= eps;
        if (tied) {
          tie_decoder_weights(plus);
          tie_decoder_weights(minus);
        }
        const double fd = (loss_only(plus, x) - loss_only(minus, x)) / (2 * eps);
        const double an = g.weights[l].data()[i];
        EXPECT_TRUE(std::abs(fd - an) < 1e-6 || std::abs(fd - an) < 1e-4 * std::abs(fd))
            << "layer " << l << " weight " << i << " fd " << fd << " analytic " << an;
      }
      for (Eigen::Index i = 0; i < m.layers[l].bias.size(); ++i) {
        SAEModel plus = m, minus = m;
        plus.layers[l].bias(i) += eps;
        minus.layers[l].bias(i) -= eps;
        const double fd = (loss_only(plus, x) - loss_only(minus, x)) / (2 * eps);
        EXPECT_NEAR(fd, g.biases[l](i), 1e-6) << "layer " << l << " bias " << i;
      }
    }
  }
}

TEST(Train, ZeroLearningRateLeavesModelUnchanged) {
  const SAEModel m = build_sae(kSmall, 3);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 2;
  cfg.batch_size = 10;
  const TrainResult r = train(m, unit_batch(50, 6, 1), cfg);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    EXPECT_EQ(r.model.layers[l].weights, m.layers[l].weights);
    EXPECT_EQ(r.model.layers[l].bias, m.layers[l].bias);
  }
  EXPECT_EQ(r.final_mse(), r.initial_mse);
}

TEST(Train, ReducesErrorOnLinearManifold) {
  const auto [x, labels] = gen_manifold({3, 20, Embedding::kLinear, 0.0, 1000, 2});
  TrainConfig cfg;
  cfg.learning_rate = 30.0;
  cfg.epochs = 30;
  cfg.batch_size = 100;
  cfg.seed = 2;
  const TrainResult r = train(build_sae({20, 10, 3, 10, 20}, 2), x, cfg);
  EXPECT_LT(r.final_mse(), 0.5 * r.initial_mse);
  EXPECT_EQ(r.epoch_mse.size(), 30u);
}

TEST(Train, EpochErrorDecreasesForSmallEnoughStep) {
  const auto [x, labels] = gen_manifold({2, 8, Embedding::kSinusoidalWarp, 0.0, 400, 3});
  TrainConfig cfg;
  cfg.learning_rate = 4.0;
  cfg.epochs = 15;
  cfg.batch_size = 400;
  cfg.seed = 3;
  bool monotone = false;
  for (int attempt = 0; attempt <= 3 && !monotone; ++attempt) {
    const TrainResult r = train(build_sae({8, 6, 2, 6, 8}, 3), x, cfg);
    monotone = r.epoch_mse.front() < r.initial_mse;
    for (std::size_t e = 1; e < r.epoch_mse.size(); ++e)
      monotone = monotone && r.epoch_mse[e] <= r.epoch_mse[e - 1];
    cfg.learning_rate /= 2;
  }
  EXPECT_TRUE(monotone);
}

TEST(Train, SnapshotsFollowScheduleAndAreDeterministic) {
  const Matrix x = unit_batch(200, 6, 4);
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.epochs = 3;
  cfg.batch_size = 20;
  cfg.seed = 8;
  cfg.snapshot_schedule = {0, 1, 5, 30};
  const TrainResult a = train(build_sae(kSmall, 8), x, cfg);
  const TrainResult b = train(build_sae(kSmall, 8), x, cfg);
  ASSERT_EQ(a.snapshots.size(), 4u);
  EXPECT_EQ(a.snapshots[0].train_mse, a.initial_mse);
  EXPECT_EQ(a.snapshots[3].train_mse, a.final_mse());
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    EXPECT_EQ(a.snapshots[s].iteration, cfg.snapshot_schedule[s]);
    EXPECT_EQ(a.snapshots[s].train_mse, b.snapshots[s].train_mse);
    EXPECT_EQ(a.snapshots[s].model.layers[1].weights, b.snapshots[s].model.layers[1].weights);
  }
}

TEST(Train, TiedWeightsStayTied) {
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.epochs = 2;
  cfg.batch_size = 25;
  cfg.tie_weights = true;
  const TrainResult r = train(build_sae(kSmall, 2), unit_batch(100, 6, 2), cfg);
  EXPECT_EQ(r.model.layers[3].weights, r.model.layers[0].weights.transpose());
  EXPECT_EQ(r.model.layers[2].weights, r.model.layers[1].weights.transpose());
}

TEST(Train, DivergenceReportsIteration) {
  TrainConfig cfg;
  cfg.learning_rate = 1e300;
  cfg.epochs = 5;
  cfg.batch_size = 10;
  try {
    train(build_sae({4, 2, 4}, 1, Activation::kLinear), fixtures::random_batch(50, 4, 1, 10.0), cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_GE(e.iteration(), 1);
  }
}

TEST(Schedule, LogSpacedDistinctAndEndsAtTotal) {
  const auto s = log_spaced_schedule(5000, 40);
  EXPECT_EQ(s.front(), 1);
  EXPECT_EQ(s.back(), 5000);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i], s[i - 1]);
  EXPECT_LE(s.size(), 40u);
  EXPECT_EQ(log_spaced_schedule(3, 10), (std::vector<long>{1, 2, 3}));
}

TEST(Pca, AxisAlignedData) {
  Matrix x = Matrix::Zero(10, 3);
  for (int i = 0; i < 10; ++i) x(i, 0) = i - 4.5;
  const Eigen::MatrixXd v = pca_top_eigvecs(x, 1);
  EXPECT_NEAR(std::abs(v(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(v(1, 0), 0.0, 1e-12);
}

TEST(Pca, OrthonormalColumns) {
  const Eigen::MatrixXd v = pca_top_eigvecs(fixtures::random_batch(50, 6, 1), 4);
  EXPECT_TRUE((v.transpose() * v).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-12));
}

TEST(Pca, LinearAutoencoderRecoversPrincipalSubspace) {
  Matrix x = fixtures::random_batch(500, 5, 7);
  const Eigen::Array<double, 1, 5> scale(3.0, 2.0, 0.3, 0.2, 0.1);
  x.array().rowwise() *= scale;
  SAEModel m = build_sae({5, 2, 5}, 7, Activation::kLinear);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 500;
  cfg.batch_size = 50;
  cfg.seed = 7;
  cfg.train_biases = false;
  const TrainResult r = train(m, x, cfg);
  const Eigen::MatrixXd pca = pca_top_eigvecs(x, 2);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(r.model.layers[1].weights.transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(5, 2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pca.transpose() * q);
  EXPECT_GT(svd.singularValues().minCoeff(), 0.99);
}
