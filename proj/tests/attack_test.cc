// Copyright 2026 The EFPSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "efpsn/attack.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "efpsn/dataset.h"
#include "efpsn/errors.h"
#include "gtest/gtest.h"

namespace efpsn {
namespace {

constexpr int kClasses = 4;
constexpr int kSide = 8;
constexpr int kPixels = kSide * kSide;

struct Case {
  LinearSoftmax model;
  Eigen::VectorXd x;
  int label;
};

Case MakeCase(uint64_t seed) {
  const Dataset images = SyntheticImages(kClasses, 1, 0.05, seed, kSide);
  return Case{LinearSoftmax::Random(kClasses, kPixels, 0.01, seed),
              images.features.row(0).transpose(), images.labels[0]};
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& z) {
  const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

TEST(IdlgLabelTest, SignRule) {
  EXPECT_EQ(IdlgLabel(Eigen::Vector3d(0.2, -0.7, 0.5)), 1);
  EXPECT_EQ(IdlgLabel(Eigen::Vector3d(0.2, 0.7, 0.5)), std::nullopt);
  EXPECT_EQ(IdlgLabel(Eigen::Vector3d(-0.2, -0.7, 0.9)), std::nullopt);
}

TEST(IdlgLabelTest, RecoversLabelFromSoftmaxMinusOnehot) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int classes = 2 + trial % 9;
    Eigen::VectorXd z(classes);
    for (int c = 0; c < classes; ++c) z(c) = normal(gen);
    const int y = static_cast<int>(gen() % classes);
    Eigen::VectorXd g = Softmax(z);
    g(y) -= 1.0;
    EXPECT_EQ(IdlgLabel(g), y);
  }
}

TEST(IdlgLabelTest, MatchesLabelOfLogisticGradient) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    Dataset one;
    one.classes = 5;
    one.features = Eigen::MatrixXd(1, 6);
    for (int f = 0; f < 6; ++f) one.features(0, f) = normal(gen);
    one.labels = {static_cast<int>(gen() % 5)};
    const LogisticObjective objective(one);
    Eigen::VectorXd theta(objective.dimension());
    for (int i = 0; i < theta.size(); ++i) theta(i) = normal(gen);
    const Eigen::VectorXd g = objective.Gradient(theta);
    EXPECT_EQ(IdlgLabel(g.tail(5)), one.labels[0]);
  }
}

TEST(DlgAttackTest, RecoversInputFromExactGradient) {
  AttackConfig cfg;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Case c = MakeCase(seed);
    cfg.seed = seed;
    const AttackResult r =
        DlgAttack(c.model, c.model.Gradient(c.x, c.label), cfg, c.x);
    EXPECT_TRUE(r.label_from_signs);
    EXPECT_EQ(r.label, c.label);
    EXPECT_FALSE(r.diverged);
    EXPECT_EQ(static_cast<int>(r.loss.size()), cfg.iterations);
    EXPECT_LE(r.final_mse, 1e-3) << "seed " << seed;
    EXPECT_GE(r.final_mse, 0.0);
  }
}

TEST(DlgAttackTest, ZeroTargetCarriesNoInformation) {
  const Case c = MakeCase(3);
  const AttackResult r =
      DlgAttack(c.model, Eigen::VectorXd::Zero(c.model.theta.size()),
                AttackConfig{}, c.x);
  EXPECT_FALSE(r.label_from_signs);
  EXPECT_GT(r.final_mse, 0.05);
}

TEST(DlgAttackTest, LossNonIncreasingForSmallStep) {
  const Case c = MakeCase(4);
  AttackConfig cfg;
  cfg.alpha = 0.01;
  cfg.iterations = 200;
  const AttackResult r =
      DlgAttack(c.model, c.model.Gradient(c.x, c.label), cfg, c.x);
  for (std::size_t i = 1; i < r.loss.size(); ++i) {
    EXPECT_LE(r.loss[i], r.loss[i - 1] * (1 + 1e-12) + 1e-300) << i;
  }
}

TEST(DlgAttackTest, DeterministicAndSnapshots) {
  const Case c = MakeCase(5);
  AttackConfig cfg;
  cfg.snapshot_every = 60;
  const Eigen::VectorXd target = c.model.Gradient(c.x, c.label);
  const AttackResult a = DlgAttack(c.model, target, cfg, c.x);
  const AttackResult b = DlgAttack(c.model, target, cfg, c.x);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.snapshots.size(), b.snapshots.size());
  EXPECT_GE(a.snapshots.size(), 5u);
  const AttackResult blind = DlgAttack(c.model, target, cfg);
  EXPECT_TRUE(std::isnan(blind.final_mse));
  EXPECT_TRUE(blind.mse.empty());
}

TEST(DlgAttackTest, DivergenceIsReportedNotThrown) {
  const Case c = MakeCase(6);
  AttackConfig cfg;
  cfg.alpha = 1e9;
  AttackResult r;
  ASSERT_NO_THROW(r = DlgAttack(c.model, c.model.Gradient(c.x, c.label), cfg, c.x));
  EXPECT_TRUE(r.diverged);
  EXPECT_LT(static_cast<int>(r.loss.size()), cfg.iterations);
}

TEST(DlgAttackTest, RejectsBadConfig) {
  const Case c = MakeCase(7);
  const Eigen::VectorXd g = c.model.Gradient(c.x, c.label);
  EXPECT_THROW(DlgAttack(c.model, g, AttackConfig{0.0, 10, 0, 0}), InvalidArgument);
  EXPECT_THROW(DlgAttack(c.model, g, AttackConfig{0.1, 0, 0, 0}), InvalidArgument);
  EXPECT_THROW(DlgAttack(c.model, Eigen::VectorXd::Zero(3), AttackConfig{}),
               InvalidArgument);
}

class SweepTest : public ::testing::Test {
 protected:
  PerturbationSetup Setup() const {
    PerturbationSetup setup;
    setup.net = MakeNetwork("ring_chord", 5);
    setup.basis = GenerateSystemFromMonomials(EnumerateMonomials(1, 8), 1);
    setup.map = CoordinateMap::First(8);
    setup.noise.n_terms = setup.basis.size();
    setup.keyring = GenerateKeyring(5, 48, 3);
    setup.seed = 11;
    return setup;
  }
};

TEST_F(SweepTest, ZeroGammaIsThePlainAttack) {
  const Case c = MakeCase(8);
  AttackConfig cfg;
  cfg.seed = 4;
  const auto sweep = AttackUnderPerturbation(c.model, c.x, c.label, {0.0},
                                             Setup(), cfg);
  ASSERT_EQ(sweep.size(), 1u);
  const AttackResult plain =
      DlgAttack(c.model, c.model.Gradient(c.x, c.label), cfg, c.x);
  EXPECT_EQ(sweep[0].result.x, plain.x);
  EXPECT_EQ(sweep[0].result.loss, plain.loss);
}

TEST_F(SweepTest, LargeNoiseBlursReconstruction) {
  const Case c = MakeCase(9);
  AttackConfig cfg;
  cfg.seed = 5;
  for (bool zero_sum : {true, false}) {
    PerturbationSetup setup = Setup();
    setup.zero_sum = zero_sum;
    const auto sweep = AttackUnderPerturbation(c.model, c.x, c.label,
                                               {0.0, 1e4}, setup, cfg);
    ASSERT_EQ(sweep.size(), 2u);
    EXPECT_EQ(sweep[1].gamma, 1e4);
    EXPECT_GE(sweep[1].result.final_mse, 10 * sweep[0].result.final_mse);
  }
  EXPECT_THROW(AttackUnderPerturbation(c.model, c.x, c.label, {-1.0}, Setup(), cfg),
               InvalidArgument);
}

TEST(PgmTest, WritesBinaryGrayscale) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "efpsn_attack_test.pgm").string();
  Eigen::VectorXd img(4);
  img << 0.0, 1.0, 0.5, 2.0;
  WritePgm(img, 2, path);
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes.substr(0, 11), "P5\n2 2\n255\n");
  ASSERT_EQ(bytes.size(), 15u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[11]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 255);
  EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 128);
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 255);
  std::remove(path.c_str());
  EXPECT_THROW(WritePgm(img, 3, path), InvalidArgument);
}

}  // namespace
}  // namespace efpsn
