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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

constexpr double kDivergenceNorm = 1e12;

// Epoch-wise sampling without replacement for one agent.
class BatchSampler {
 public:
  BatchSampler(int rows, int batch, uint64_t seed)
      : rows_(rows), batch_(batch), rng_(seed), order_(rows) {
    std::iota(order_.begin(), order_.end(), 0);
    cursor_ = rows_;  // forces a shuffle on first use
  }

  std::span<const int> Next() {
    if (cursor_ + batch_ > rows_) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
    }
    std::span<const int> out(order_.data() + cursor_, batch_);
    cursor_ += batch_;
    return out;
  }

 private:
  int rows_;
  int batch_;
  Rng rng_;
  std::vector<int> order_;
  int cursor_;
};

void CheckFinite(const Eigen::VectorXd& x, int step) {
  const double norm = x.norm();
  if (!std::isfinite(norm) || norm > kDivergenceNorm) {
    throw Divergence("optimizer: iterate norm exceeded 1e12 at step " +
                     std::to_string(step));
  }
}

int CommonDimension(const std::vector<ObjectivePtr>& objectives) {
  if (objectives.empty()) throw InvalidArgument("optimizer: no objectives");
  const int dim = objectives.front()->dimension();
  for (const auto& f : objectives) {
    if (!f) throw InvalidArgument("optimizer: null objective");
    if (f->dimension() != dim) {
      throw InvalidArgument("optimizer: objectives differ in dimension");
    }
  }
  return dim;
}

Eigen::VectorXd StartPoint(const std::optional<Eigen::VectorXd>& x0, int dim) {
  if (!x0) return Eigen::VectorXd::Zero(dim);
  if (x0->size() != dim) throw InvalidArgument("optimizer: x0 dimension mismatch");
  return *x0;
}

}  // namespace

void Schedule::Validate() const {
  if (!(initial_rate > 0.0) || !(final_rate > 0.0)) {
    throw InvalidArgument("schedule: rates must be positive");
  }
  if (total_steps < 0 || hold_steps < 0 || hold_steps > total_steps) {
    throw InvalidArgument("schedule: need 0 <= hold_steps <= total_steps");
  }
}

double Schedule::Rate(int t) const {
  if (t <= hold_steps || total_steps == hold_steps) return initial_rate;
  if (t >= total_steps) return final_rate;
  const double frac =
      static_cast<double>(t - hold_steps) / (total_steps - hold_steps);
  return initial_rate * std::pow(final_rate / initial_rate, frac);
}

Eigen::VectorXd AgentState::Mean() const {
  if (x.empty()) throw InvalidArgument("optimizer: empty state");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.front().size());
  for (const auto& xi : x) sum += xi;
  return sum / static_cast<double>(x.size());
}

Trajectory Dsgd(const Network& net, const std::vector<ObjectivePtr>& objectives,
                const Schedule& schedule, const DsgdOptions& options) {
  schedule.Validate();
  const int n = net.size();
  if (static_cast<int>(objectives.size()) != n) {
    throw InvalidArgument("dsgd: need one objective per agent");
  }
  const int dim = CommonDimension(objectives);
  const Eigen::MatrixXd& w = net.mixing();

  std::vector<std::optional<BatchSampler>> samplers(n);
  for (int i = 0; i < n; ++i) {
    const int rows = objectives[i]->num_samples();
    if (options.batch_size > 0 && options.batch_size < rows) {
      samplers[i].emplace(rows, options.batch_size,
                          DeriveSeed(options.seed, {stream::kBatch,
                                                    static_cast<uint64_t>(i)}));
    }
  }

  AgentState state;
  state.x.assign(n, StartPoint(options.x0, dim));
  Trajectory out;
  auto record = [&](const AgentState& s) {
    out.states.push_back(s);
    if (options.observer) options.observer(s);
  };
  record(state);

  std::vector<Eigen::VectorXd> next(n);
  for (int t = 0; t < schedule.total_steps; ++t) {
    const double rate = schedule.Rate(t);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd mixed = Eigen::VectorXd::Zero(dim);
      for (int j = 0; j < n; ++j) {
        if (w(i, j) != 0.0) mixed += w(i, j) * state.x[j];
      }
      const Eigen::VectorXd grad =
          samplers[i] ? objectives[i]->BatchGradient(state.x[i], samplers[i]->Next())
                      : objectives[i]->Gradient(state.x[i]);
      next[i] = mixed - rate * grad;
      CheckFinite(next[i], t + 1);
    }
    state.x.swap(next);
    state.step = t + 1;
    const bool last = state.step == schedule.total_steps;
    if (last || (options.record_every > 0 && state.step % options.record_every == 0)) {
      record(state);
    }
  }
  return out;
}

Eigen::VectorXd CentralizedGd(const std::vector<ObjectivePtr>& objectives,
                              const Schedule& schedule,
                              const CentralizedOptions& options) {
  schedule.Validate();
  const int dim = CommonDimension(objectives);
  const double n = static_cast<double>(objectives.size());
  Eigen::VectorXd x = StartPoint(options.x0, dim);
  for (int t = 0; t < schedule.total_steps; ++t) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    for (const auto& f : objectives) grad += f->Gradient(x);
    grad /= n;
    if (options.grad_tol > 0.0 && grad.norm() <= options.grad_tol) break;
    x -= schedule.Rate(t) * grad;
    CheckFinite(x, t + 1);
  }
  return x;
}

double Deviation(const AgentState& state, const Eigen::VectorXd& x_star) {
  const Eigen::VectorXd mean = state.Mean();
  if (mean.size() != x_star.size()) {
    throw InvalidArgument("deviation: dimension mismatch");
  }
  return (mean - x_star).norm();
}

double AvgGradientNorm(const AgentState& state,
                       const std::vector<ObjectivePtr>& objectives) {
  if (state.x.size() != objectives.size()) {
    throw InvalidArgument("avg_gradient_norm: need one objective per agent");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(state.x.front().size());
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    sum += objectives[i]->Gradient(state.x[i]);
  }
  return (sum / static_cast<double>(objectives.size())).squaredNorm();
}

Eigen::VectorXd QuadraticOptimum(
    const std::vector<std::shared_ptr<const QuadraticObjective>>& objectives) {
  if (objectives.empty()) throw InvalidArgument("optimizer: no objectives");
  Eigen::MatrixXd q = objectives.front()->q();
  Eigen::VectorXd b = objectives.front()->b();
  for (std::size_t i = 1; i < objectives.size(); ++i) {
    q += objectives[i]->q();
    b += objectives[i]->b();
  }
  return -q.llt().solve(b);
}

}  // namespace efpsn
