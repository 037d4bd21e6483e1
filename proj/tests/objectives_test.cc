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

#include "efpsn/objectives.h"

#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "efpsn/errors.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/polybasis.h"
#include "gtest/gtest.h"

namespace efpsn {
namespace {

Eigen::VectorXd RandomVector(int n, std::mt19937_64& gen, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

Eigen::MatrixXd RandomSpd(int n, std::mt19937_64& gen) {
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) a.col(j) = RandomVector(n, gen);
  return a.transpose() * a / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

// Central differences with step 1e-6 (1 + |x_i|); relative 1e-5 agreement.
void ExpectGradientMatchesFiniteDifferences(const Objective& f,
                                            const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = f.Gradient(x);
  ASSERT_EQ(g.size(), f.dimension());
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    Eigen::VectorXd up = x, down = x;
    up(i) += h;
    down(i) -= h;
    const double fd = (f.Value(up) - f.Value(down)) / (2 * h);
    EXPECT_NEAR(g(i), fd, 1e-5 * std::max(1.0, std::abs(fd))) << "coord " << i;
  }
}

Dataset SmallMixture(uint64_t seed, int classes = 3) {
  MixtureParams params;
  params.classes = classes;
  params.features = 4;
  params.samples = 60;
  return GaussianMixture(params, seed);
}

TEST(QuadraticTest, IdentityExamples) {
  const QuadraticObjective zero(Eigen::MatrixXd::Identity(2, 2),
                                Eigen::VectorXd::Zero(2));
  EXPECT_EQ(zero.Minimizer(), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(zero.Value(Eigen::VectorXd::Zero(2)), 0.0);
  const QuadraticObjective shifted(Eigen::MatrixXd::Identity(2, 2),
                                   Eigen::VectorXd::Ones(2));
  EXPECT_EQ(shifted.Minimizer(), -Eigen::VectorXd::Ones(2));
}

TEST(QuadraticTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const QuadraticObjective f(RandomSpd(n, gen), RandomVector(n, gen));
    ExpectGradientMatchesFiniteDifferences(f, RandomVector(n, gen));
    EXPECT_LE(f.Gradient(f.Minimizer()).norm(), 1e-10);
  }
}

TEST(QuadraticTest, RejectsNonSpd) {
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_THROW(QuadraticObjective(indefinite, Eigen::VectorXd::Zero(2)),
               InvalidArgument);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(QuadraticObjective(asym, Eigen::VectorXd::Zero(2)),
               InvalidArgument);
  EXPECT_THROW(QuadraticObjective(Eigen::MatrixXd::Identity(2, 2),
                                  Eigen::VectorXd::Zero(3)),
               InvalidArgument);
}

TEST(LogisticTest, BalancedZeroParametersGiveLogTwo) {
  Dataset data;
  data.classes = 2;
  data.features = Eigen::MatrixXd::Random(10, 3);
  data.labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const LogisticObjective f(data);
  EXPECT_NEAR(f.Value(Eigen::VectorXd::Zero(f.dimension())), std::log(2.0),
              1e-15);
  EXPECT_EQ(f.dimension(), 2 * 4);
}

TEST(LogisticTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(2);
  for (double l2 : {0.0, 0.1}) {
    const LogisticObjective f(SmallMixture(3), l2);
    for (int trial = 0; trial < 5; ++trial) {
      ExpectGradientMatchesFiniteDifferences(
          f, RandomVector(f.dimension(), gen, 0.5));
    }
  }
}

TEST(LogisticTest, BatchGradientAveragesSampleGradients) {
  std::mt19937_64 gen(3);
  const Dataset data = SmallMixture(4);
  const LogisticObjective f(data);
  const Eigen::VectorXd theta = RandomVector(f.dimension(), gen);
  const std::vector<int> batch = {3, 17, 42, 5};
  Eigen::VectorXd want = Eigen::VectorXd::Zero(f.dimension());
  for (int r : batch) {
    want += SampleGradient(theta, data.classes, data.features.row(r).transpose(),
                           data.labels[r]);
  }
  want /= batch.size();
  EXPECT_LE((f.BatchGradient(theta, batch) - want).cwiseAbs().maxCoeff(), 1e-12);
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_LE((f.BatchGradient(theta, all) - f.Gradient(theta)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(LogisticTest, DescentAlongNegativeGradient) {
  std::mt19937_64 gen(5);
  const LogisticObjective f(SmallMixture(6), 0.01);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = RandomVector(f.dimension(), gen);
    const Eigen::VectorXd g = f.Gradient(x);
    EXPECT_LT(f.Value(x - 1e-3 * g), f.Value(x));
  }
}

TEST(LogisticTest, StableForLargeLogits) {
  const LogisticObjective f(SmallMixture(7));
  const Eigen::VectorXd big = Eigen::VectorXd::Constant(f.dimension(), 500.0);
  EXPECT_TRUE(std::isfinite(f.Value(big)));
  EXPECT_TRUE(f.Gradient(big).allFinite());
}

TEST(LogisticTest, RejectsBadShapes) {
  Dataset data = SmallMixture(8);
  Dataset bad_label = data;
  bad_label.labels[0] = 7;
  EXPECT_THROW(LogisticObjective{bad_label}, InvalidArgument);
  Dataset bad_rows = data;
  bad_rows.labels.pop_back();
  EXPECT_THROW(LogisticObjective{bad_rows}, InvalidArgument);
  EXPECT_THROW(LogisticObjective(data, -1.0), InvalidArgument);
}

TEST(LogisticTest, ParameterLayout) {
  EXPECT_EQ(LogisticDimension(3, 4), 15);
  EXPECT_EQ(WeightIndex(4, 1, 2), 6);
  EXPECT_EQ(BiasIndex(3, 4, 2), 14);
  const CoordinateMap bias = CoordinateMap::Bias(3, 4, 2);
  EXPECT_EQ(bias.indices, (std::vector<int>{12, 13}));
  EXPECT_EQ(CoordinateMap::First(3).indices, (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(CoordinateMap::Bias(3, 4, 4), InvalidArgument);
}

TEST(LogisticTest, SampleGradientBiasIsSoftmaxMinusOnehot) {
  std::mt19937_64 gen(9);
  const Eigen::VectorXd theta = RandomVector(15, gen);
  const Eigen::VectorXd x = RandomVector(4, gen);
  const Eigen::VectorXd s = ClassProbabilities(theta, 3, x);
  EXPECT_NEAR(s.sum(), 1.0, 1e-15);
  const Eigen::VectorXd g = SampleGradient(theta, 3, x, 1);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(g(BiasIndex(3, 4, c)), s(c) - (c == 1 ? 1.0 : 0.0), 1e-15);
    for (int f = 0; f < 4; ++f) {
      EXPECT_NEAR(g(WeightIndex(4, c, f)), g(BiasIndex(3, 4, c)) * x(f), 1e-15);
    }
  }
}

TEST(LogisticTest, AccuracyOfPerfectSeparator) {
  Dataset data;
  data.classes = 2;
  data.features.resize(4, 1);
  data.features << -2, -1, 1, 2;
  data.labels = {0, 0, 1, 1};
  Eigen::VectorXd theta(4);
  theta << -1, 1, 0, 0;  // w0 = -1, w1 = 1
  EXPECT_DOUBLE_EQ(Accuracy(theta, data), 1.0);
  EXPECT_DOUBLE_EQ(Accuracy(-theta, data), 0.0);
}

TEST(PerturbedTest, ZeroPolynomialIsIdentity) {
  std::mt19937_64 gen(10);
  auto base = std::make_shared<QuadraticObjective>(RandomSpd(4, gen),
                                                   RandomVector(4, gen));
  const auto f = Perturb(base, Polynomial(2), CoordinateMap::First(2));
  const Eigen::VectorXd x = RandomVector(4, gen);
  EXPECT_EQ(f->Value(x), base->Value(x));
  EXPECT_EQ(f->Gradient(x), base->Gradient(x));
}

TEST(PerturbedTest, LinearTermShiftsOneCoordinate) {
  std::mt19937_64 gen(11);
  auto base = std::make_shared<QuadraticObjective>(RandomSpd(4, gen),
                                                   RandomVector(4, gen));
  Polynomial p(2);
  p.AddTerm({1, 0}, 2.5);
  const auto f = Perturb(base, p, CoordinateMap{{3, 1}});
  const Eigen::VectorXd x = RandomVector(4, gen);
  const Eigen::VectorXd diff = f->Gradient(x) - base->Gradient(x);
  EXPECT_NEAR(diff(3), 2.5, 1e-15);
  EXPECT_EQ(diff(0), 0.0);
  EXPECT_EQ(diff(1), 0.0);
  EXPECT_EQ(diff(2), 0.0);
  EXPECT_NEAR(f->Value(x) - base->Value(x), 2.5 * x(3), 1e-12);
}

TEST(PerturbedTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(12);
  const OrthonormalSystem sys = GenerateSystem({3, 3, 10, 4});
  auto base = std::make_shared<LogisticObjective>(SmallMixture(13), 0.01);
  for (int trial = 0; trial < 5; ++trial) {
    CoefficientVector c(10);
    for (double& v : c) v = std::normal_distribution<double>()(gen);
    const auto f = Perturb(base, Phi(c, sys), CoordinateMap::Bias(3, 4, 3));
    ExpectGradientMatchesFiniteDifferences(
        *f, RandomVector(f->dimension(), gen, 0.5));
  }
}

TEST(PerturbedTest, RejectsBadMaps) {
  auto base = std::make_shared<QuadraticObjective>(
      Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
  EXPECT_THROW(Perturb(base, Polynomial(2), CoordinateMap{{0, 3}}),
               InvalidArgument);
  EXPECT_THROW(Perturb(base, Polynomial(2), CoordinateMap{{1, 1}}),
               InvalidArgument);
  EXPECT_THROW(Perturb(base, Polynomial(2), CoordinateMap{{0}}),
               InvalidArgument);
}

TEST(PerturbedTest, ZeroSumPerturbationsPreserveGlobalObjective) {
  std::mt19937_64 gen(14);
  const Network net = MakeNetwork("ring_chord", 5);
  const OrthonormalSystem sys = GenerateSystem({2, 3, 8, 2});
  NoiseConfig cfg;
  cfg.gamma = 100.0;
  cfg.n_terms = 8;
  const PerturbationCoefficients eta =
      RunPhase1(net, cfg, GenerateKeyring(5, 48, 1), 3);

  std::vector<std::shared_ptr<const QuadraticObjective>> bases;
  std::vector<ObjectivePtr> perturbed;
  Polynomial total(3);
  for (int i = 0; i < 5; ++i) {
    bases.push_back(std::make_shared<QuadraticObjective>(RandomSpd(6, gen),
                                                         RandomVector(6, gen)));
    Eigen::VectorXd r = eta.eta_bar.row(i).transpose();
    const Polynomial p = Phi(CoefficientVector(r.data(), r.data() + r.size()), sys);
    total += p;
    perturbed.push_back(Perturb(bases.back(), p, CoordinateMap::First(3)));
  }
  // Coefficient level: the summed polynomial vanishes up to rounding.
  for (const auto& [alpha, coef] : total.terms()) EXPECT_NEAR(coef, 0.0, 1e-9);

  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = RandomVector(6, gen);
    double want = 0.0, got = 0.0;
    for (int i = 0; i < 5; ++i) {
      want += bases[i]->Value(x);
      got += perturbed[i]->Value(x);
    }
    EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

}  // namespace
}  // namespace efpsn
