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

// Privacy accounting for the zero-sum functional perturbation mechanism:
// sensitivity norm, closed-form (epsilon, delta), the degenerate Gaussian
// noise density and a Monte-Carlo check of the likelihood-ratio bound.

#ifndef EFPSN_DP_ACCOUNTING_H_
#define EFPSN_DP_ACCOUNTING_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/graph.h"
#include "efpsn/noise_protocol.h"

namespace efpsn {

struct DPParams {
  double q = 2.0;      // adjacency-space exponent, > 1
  double p_exp = 1.0;  // noise decay, in (1/2, q - 1/2)
  double gamma = 1.0;  // > 0
  double R = 2.0;      // tail parameter, > 0

  // Throws InvalidArgument.
  void Validate() const;
};

struct DPBudget {
  double epsilon = 0.0;
  double delta = 1.0;
  double A = 0.0;
};

// (sum_k k^(2q) d_k^4)^(1/4) with d[k-1] = d_k.
double VqNorm(const std::vector<double>& delta_coeffs, double q);

// Riemann zeta for real s > 1: 1e5 direct terms plus an Euler-Maclaurin
// tail through the B2 term. Throws InvalidArgument for s <= 1.
double Zeta(double s);

// sqrt(zeta(2(q - p))) * ||f_diff||_{V_q}^2 / gamma.
double ComputeA(const std::vector<double>& f_diff, const DPParams& params);

// epsilon = (A/4 + R sqrt(mu_high A / 2)) / mu_low, delta = exp(-R^2 / 2).
// Throws DisconnectedGraph when mu_low is zero.
DPBudget Budget(double A, double R, double mu_low, double mu_high);

// sqrt(-2 ln delta) for delta in (0, 1).
double RForDelta(double delta_target);

// Log density of N(0, 2 sigma_sq L) restricted to the zero-sum plane;
// -infinity when |y^T 1| > 1e-9 ||y||.
double DegenerateGaussianLogDensity(const Eigen::VectorXd& y, double sigma_sq,
                                    const Network& net);

struct MonteCarloDpResult {
  int trials = 0;
  double violation_rate = 0.0;          // exact ratio above e^epsilon
  double bounded_violation_rate = 0.0;  // mu_low-bounded ratio above e^epsilon
  double contract_limit = 0.0;          // delta + 3 binomial standard errors
  int ordering_failures = 0;            // trials with exact > bounded
  double max_log_ratio = 0.0;           // largest exact log ratio seen
  DPBudget budget;
};

// Samples eta_bar from the Phase I share stage (unquantized) for each trial
// and evaluates the truncated log ratio
//   sum_k (2 xi_k^T L^+ eta_k + xi_k^T L^+ xi_k) / (4 sigma_k^2)
// with xi_k = f_diff[k-1] e_agent, along with its 1/mu_low upper form.
// Requires f_diff.size() <= cfg.n_terms and trials >= 1e4; cfg's gamma and
// p_exp must match params.
MonteCarloDpResult MonteCarloDpCheck(const Network& net, const NoiseConfig& cfg,
                                     const DPParams& params,
                                     const std::vector<double>& f_diff,
                                     int trials, uint64_t seed, int agent = 0);

}  // namespace efpsn

#endif  // EFPSN_DP_ACCOUNTING_H_
