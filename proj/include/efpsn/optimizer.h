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

// Decentralized gradient descent over a gossip network, the centralized
// baseline, and the accuracy metrics reported by experiments.

#ifndef EFPSN_OPTIMIZER_H_
#define EFPSN_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/graph.h"
#include "efpsn/objectives.h"

namespace efpsn {

// Constant rate for the first `hold_steps` steps, then exponential decay to
// `final_rate` at `total_steps`.
struct Schedule {
  double initial_rate = 0.1;
  int hold_steps = 0;
  double final_rate = 0.1;
  int total_steps = 100;

  // Throws InvalidArgument on non-positive rates or hold_steps > total_steps.
  void Validate() const;
  double Rate(int t) const;
};

struct AgentState {
  std::vector<Eigen::VectorXd> x;
  int step = 0;

  Eigen::VectorXd Mean() const;
};

struct DsgdOptions {
  // Rows per local mini-batch; <= 0 or >= the local sample count means full
  // batch.
  int batch_size = 0;
  uint64_t seed = 0;
  // Record a state every this many steps (the initial and final states are
  // always kept). 0 keeps only those two.
  int record_every = 0;
  // Common starting point; zeros when absent.
  std::optional<Eigen::VectorXd> x0;
  // Called on each recorded state.
  std::function<void(const AgentState&)> observer;
};

struct Trajectory {
  std::vector<AgentState> states;
  const AgentState& last() const { return states.back(); }
};

// x_i <- sum_j w_ij x_j - alpha_t grad f_i(x_i). Throws InvalidArgument on
// size mismatch and Divergence once any iterate norm exceeds 1e12.
Trajectory Dsgd(const Network& net, const std::vector<ObjectivePtr>& objectives,
                const Schedule& schedule, const DsgdOptions& options = {});

struct CentralizedOptions {
  std::optional<Eigen::VectorXd> x0;
  // Stop early once ||grad F|| <= grad_tol (0 disables).
  double grad_tol = 0.0;
};

// Gradient descent on F = (1/n) sum_i f_i.
Eigen::VectorXd CentralizedGd(const std::vector<ObjectivePtr>& objectives,
                              const Schedule& schedule,
                              const CentralizedOptions& options = {});

// ||mean_i x_i - x_star||.
double Deviation(const AgentState& state, const Eigen::VectorXd& x_star);

// ||(1/n) sum_i grad f_i(x_i)||^2 using the objectives given (pass the
// unperturbed ones).
double AvgGradientNorm(const AgentState& state,
                       const std::vector<ObjectivePtr>& objectives);

// -(sum Q_i)^-1 (sum b_i) for quadratic objectives.
Eigen::VectorXd QuadraticOptimum(
    const std::vector<std::shared_ptr<const QuadraticObjective>>& objectives);

}  // namespace efpsn

#endif  // EFPSN_OPTIMIZER_H_
