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

#include "efpsn/optimizer.h"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "efpsn/errors.h"
#include "gtest/gtest.h"

namespace efpsn {
namespace {

using QuadraticPtr = std::shared_ptr<const QuadraticObjective>;

std::vector<QuadraticPtr> RandomQuadratics(int n, int dim, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<QuadraticPtr> out;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd b(dim);
    for (int r = 0; r < dim; ++r) {
      b(r) = normal(gen);
      for (int c = 0; c < dim; ++c) a(r, c) = normal(gen);
    }
    out.push_back(std::make_shared<QuadraticObjective>(
        a.transpose() * a / dim + Eigen::MatrixXd::Identity(dim, dim), b));
  }
  return out;
}

std::vector<ObjectivePtr> AsObjectives(const std::vector<QuadraticPtr>& qs) {
  return {qs.begin(), qs.end()};
}

// Gradient c at the origin and zero elsewhere: one kick, then pure gossip.
class KickObjective : public Objective {
 public:
  explicit KickObjective(Eigen::VectorXd c) : c_(std::move(c)) {}
  int dimension() const override { return static_cast<int>(c_.size()); }
  double Value(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const override {
    return x.isZero(0.0) ? c_ : Eigen::VectorXd::Zero(c_.size());
  }

 private:
  Eigen::VectorXd c_;
};

TEST(ScheduleTest, Endpoints) {
  const Schedule s{0.2, 2000, 4e-5, 10000};
  EXPECT_EQ(s.Rate(0), 0.2);
  EXPECT_EQ(s.Rate(2000), 0.2);
  EXPECT_NEAR(s.Rate(10000), 4e-5, 1e-12);
  EXPECT_NEAR(s.Rate(6000), 0.2 * std::sqrt(4e-5 / 0.2), 1e-12);
  for (int t = 2000; t < 10000; t += 50) EXPECT_GT(s.Rate(t), s.Rate(t + 50));
  const Schedule flat{0.3, 10, 0.3, 10};
  EXPECT_EQ(flat.Rate(10), 0.3);
}

TEST(ScheduleTest, Validation) {
  EXPECT_THROW((Schedule{0.0, 0, 0.1, 10}.Validate()), InvalidArgument);
  EXPECT_THROW((Schedule{0.1, 0, -0.1, 10}.Validate()), InvalidArgument);
  EXPECT_THROW((Schedule{0.1, 11, 0.1, 10}.Validate()), InvalidArgument);
  EXPECT_NO_THROW((Schedule{0.1, 10, 0.01, 10}.Validate()));
}

TEST(DsgdTest, SingleAgentEqualsCentralizedGd) {
  const auto qs = RandomQuadratics(1, 4, 1);
  const Schedule s{0.1, 50, 1e-3, 300};
  const Network net = Network::Build(1, {});
  const Trajectory traj = Dsgd(net, AsObjectives(qs), s);
  const Eigen::VectorXd central = CentralizedGd(AsObjectives(qs), s);
  EXPECT_EQ(traj.last().x[0], central);
  EXPECT_EQ(traj.last().step, 300);
}

// With a shared Hessian the mean iterate follows exact gradient descent on
// F, so the closed-form optimum is reached without consensus bias.
TEST(DsgdTest, CompleteGraphSharedHessianReachesGlobalOptimum) {
  const auto base = RandomQuadratics(5, 4, 2);
  std::vector<QuadraticPtr> qs;
  for (const QuadraticPtr& q : base) {
    qs.push_back(std::make_shared<QuadraticObjective>(base[0]->q(), q->b()));
  }
  const Eigen::VectorXd x_star = QuadraticOptimum(qs);
  const Network net = MakeNetwork("complete", 5);
  const Trajectory traj =
      Dsgd(net, AsObjectives(qs), Schedule{0.2, 500, 1e-7, 3000});
  EXPECT_LE(Deviation(traj.last(), x_star), 1e-6);
}

// Heterogeneous Hessians leave an O(rate) consensus bias; it shrinks as the
// decay is stretched.
TEST(DsgdTest, CompleteGraphHeterogeneousBiasShrinksWithSchedule) {
  const auto qs = RandomQuadratics(5, 4, 2);
  const Eigen::VectorXd x_star = QuadraticOptimum(qs);
  const Network net = MakeNetwork("complete", 5);
  const double short_run = Deviation(
      Dsgd(net, AsObjectives(qs), Schedule{0.2, 500, 1e-9, 3000}).last(), x_star);
  const double long_run = Deviation(
      Dsgd(net, AsObjectives(qs), Schedule{0.2, 500, 1e-9, 30000}).last(), x_star);
  EXPECT_LT(long_run, short_run / 5.0);
  EXPECT_LE(long_run, 1e-3);
}

TEST(DsgdTest, RecordsRequestedSteps) {
  const auto qs = RandomQuadratics(3, 2, 3);
  DsgdOptions options;
  options.record_every = 40;
  int observed = 0;
  options.observer = [&](const AgentState&) { ++observed; };
  const Trajectory traj = Dsgd(MakeNetwork("path", 3), AsObjectives(qs),
                               Schedule{0.1, 0, 0.1, 100}, options);
  ASSERT_EQ(traj.states.size(), 4u);  // 0, 40, 80, 100
  EXPECT_EQ(traj.states[0].step, 0);
  EXPECT_EQ(traj.states[1].step, 40);
  EXPECT_EQ(traj.states[3].step, 100);
  EXPECT_EQ(observed, 4);
}

TEST(DsgdTest, MiniBatchRunsAreDeterministic) {
  MixtureParams params;
  params.features = 5;
  params.samples = 300;
  const auto shards = SplitEvenly(GaussianMixture(params, 1), 3, 2);
  std::vector<ObjectivePtr> fs;
  for (const Dataset& d : shards) {
    fs.push_back(std::make_shared<LogisticObjective>(d, 0.01));
  }
  DsgdOptions options;
  options.batch_size = 16;
  options.seed = 9;
  const Network net = MakeNetwork("path", 3);
  const Schedule s{0.2, 50, 0.01, 200};
  const Trajectory a = Dsgd(net, fs, s, options);
  const Trajectory b = Dsgd(net, fs, s, options);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.last().x[i], b.last().x[i]);
  options.seed = 10;
  const Trajectory c = Dsgd(net, fs, s, options);
  EXPECT_NE(a.last().x[0], c.last().x[0]);
  // Oversized batches fall back to the full gradient.
  options.batch_size = 1000;
  const Trajectory full = Dsgd(net, fs, s, options);
  options.batch_size = 0;
  EXPECT_EQ(full.last().x[0], Dsgd(net, fs, s, options).last().x[0]);
}

TEST(DsgdTest, GossipContractsAndPreservesMean) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  const Network net = ErdosRenyi(8, 0.35, 5);
  std::vector<ObjectivePtr> fs;
  for (int i = 0; i < 8; ++i) {
    Eigen::VectorXd c(3);
    for (int d = 0; d < 3; ++d) c(d) = normal(gen);
    fs.push_back(std::make_shared<KickObjective>(c));
  }
  DsgdOptions options;
  options.record_every = 1;
  const Trajectory traj = Dsgd(net, fs, Schedule{1.0, 0, 1.0, 60}, options);
  const Eigen::VectorXd mean = traj.states[1].Mean();
  double prev_spread = INFINITY;
  for (std::size_t t = 1; t < traj.states.size(); ++t) {
    const AgentState& s = traj.states[t];
    EXPECT_LE((s.Mean() - mean).cwiseAbs().maxCoeff(), 1e-12);
    double spread = 0.0;
    for (const auto& xi : s.x) spread = std::max(spread, (xi - s.Mean()).norm());
    EXPECT_LE(spread, prev_spread + 1e-15);
    prev_spread = spread;
  }
  EXPECT_LT(prev_spread, 1e-3);
}

TEST(DsgdTest, DivergenceGuard) {
  auto f = std::make_shared<QuadraticObjective>(Eigen::MatrixXd::Identity(2, 2),
                                                Eigen::VectorXd::Ones(2));
  const std::vector<ObjectivePtr> fs = {f, f};
  EXPECT_THROW(Dsgd(MakeNetwork("path", 2), fs, Schedule{10.0, 0, 10.0, 100}),
               Divergence);
  EXPECT_THROW(CentralizedGd(fs, Schedule{10.0, 0, 10.0, 100}), Divergence);
}

TEST(DsgdTest, RejectsMismatchedInputs) {
  const auto qs = RandomQuadratics(2, 2, 6);
  EXPECT_THROW(Dsgd(MakeNetwork("path", 3), AsObjectives(qs), Schedule{}),
               InvalidArgument);
  auto other = RandomQuadratics(1, 3, 7);
  std::vector<ObjectivePtr> mixed = {qs[0], other[0]};
  EXPECT_THROW(Dsgd(MakeNetwork("path", 2), mixed, Schedule{}), InvalidArgument);
  DsgdOptions options;
  options.x0 = Eigen::VectorXd::Zero(5);
  EXPECT_THROW(Dsgd(MakeNetwork("path", 2), AsObjectives(qs), Schedule{}, options),
               InvalidArgument);
}

TEST(CentralizedTest, QuadraticMatchesLinearSolve) {
  const auto qs = RandomQuadratics(4, 5, 8);
  const Eigen::VectorXd x = CentralizedGd(AsObjectives(qs), Schedule{0.3, 5000, 0.3, 5000});
  // Independent oracle: normal equations via a full-pivot LU.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(5, 5);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(5);
  for (const auto& f : qs) {
    q += f->q();
    b += f->b();
  }
  const Eigen::VectorXd oracle = -q.fullPivLu().solve(b);
  EXPECT_LE((x - oracle).norm(), 1e-8);
  EXPECT_LE((QuadraticOptimum(qs) - oracle).norm(), 1e-12);
}

TEST(CentralizedTest, LogisticReachesStationarity) {
  MixtureParams params;
  params.features = 6;
  params.samples = 200;
  const auto shards = SplitEvenly(GaussianMixture(params, 3), 2, 4);
  std::vector<ObjectivePtr> fs;
  for (const Dataset& d : shards) {
    fs.push_back(std::make_shared<LogisticObjective>(d, 0.01));
  }
  CentralizedOptions options;
  options.grad_tol = 1e-7;
  const Schedule s{0.5, 100000, 0.5, 100000};
  const Eigen::VectorXd x = CentralizedGd(fs, s, options);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (const auto& f : fs) g += f->Gradient(x);
  EXPECT_LE((g / 2.0).norm(), 1e-6);
  EXPECT_EQ(CentralizedGd(fs, s, options), x);
}

TEST(MetricsTest, Deviation) {
  const Eigen::VectorXd x_star = Eigen::Vector3d(1, 2, 3);
  AgentState s;
  s.x = {x_star, x_star};
  EXPECT_EQ(Deviation(s, x_star), 0.0);
  s.x = {x_star + Eigen::Vector3d(2, 0, 0), x_star};
  EXPECT_DOUBLE_EQ(Deviation(s, x_star), 1.0);
  std::swap(s.x[0], s.x[1]);
  EXPECT_DOUBLE_EQ(Deviation(s, x_star), 1.0);
  EXPECT_THROW(Deviation(s, Eigen::VectorXd::Zero(2)), InvalidArgument);
}

TEST(MetricsTest, AvgGradientNorm) {
  const auto qs = RandomQuadratics(3, 3, 10);
  const auto fs = AsObjectives(qs);
  AgentState s;
  const Eigen::VectorXd x_star = QuadraticOptimum(qs);
  s.x = {x_star, x_star, x_star};
  EXPECT_LE(AvgGradientNorm(s, fs), 1e-24);

  AgentState single;
  single.x = {Eigen::Vector3d(1, -1, 0.5)};
  EXPECT_DOUBLE_EQ(AvgGradientNorm(single, {fs[0]}),
                   fs[0]->Gradient(single.x[0]).squaredNorm());

  // Agents sitting at x_star +/- v on identical quadratics see g and -g.
  const std::vector<ObjectivePtr> twin = {fs[0], fs[0]};
  const Eigen::VectorXd m = qs[0]->Minimizer();
  const Eigen::Vector3d v(0.3, -0.2, 0.1);
  AgentState opposite;
  opposite.x = {m + v, m - v};
  EXPECT_LE(AvgGradientNorm(opposite, twin), 1e-28);
}

}  // namespace
}  // namespace efpsn
