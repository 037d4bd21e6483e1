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

#include "efpsn/dp_accounting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

constexpr int kZetaTerms = 100000;
constexpr int kMinTrials = 10000;

}  // namespace

void DPParams::Validate() const {
  if (!(q > 1.0)) throw InvalidArgument("dp: q must exceed 1");
  if (!(gamma > 0.0)) throw InvalidArgument("dp: gamma must be positive");
  if (!(R > 0.0)) throw InvalidArgument("dp: R must be positive");
  if (!(p_exp > 0.5 && p_exp < q - 0.5)) {
    throw InvalidArgument("dp: p must lie in (1/2, q - 1/2)");
  }
}

double VqNorm(const std::vector<double>& delta_coeffs, double q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < delta_coeffs.size(); ++i) {
    const double d2 = delta_coeffs[i] * delta_coeffs[i];
    sum += std::pow(static_cast<double>(i + 1), 2.0 * q) * d2 * d2;
  }
  return std::pow(sum, 0.25);
}

double Zeta(double s) {
  if (!(s > 1.0)) throw InvalidArgument("zeta: s must exceed 1");
  // sum_{n < N} n^-s, smallest terms first.
  const double big_n = kZetaTerms;
  double sum = 0.0;
  for (int n = kZetaTerms - 1; n >= 1; --n) sum += std::pow(n, -s);
  // Tail sum_{n >= N} n^-s = N^(1-s)/(s-1) + N^-s/2 + s N^(-s-1)/12 + O(N^(-s-3)).
  sum += std::pow(big_n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(big_n, -s) +
         s * std::pow(big_n, -s - 1.0) / 12.0;
  return sum;
}

double ComputeA(const std::vector<double>& f_diff, const DPParams& params) {
  params.Validate();
  const double norm = VqNorm(f_diff, params.q);
  return std::sqrt(Zeta(2.0 * (params.q - params.p_exp))) * norm * norm /
         params.gamma;
}

DPBudget Budget(double A, double R, double mu_low, double mu_high) {
  if (!(mu_low > 1e-12)) {
    throw DisconnectedGraph("dp: algebraic connectivity is zero");
  }
  if (A < 0.0 || R < 0.0 || mu_high < mu_low) {
    throw InvalidArgument("dp: need A >= 0, R >= 0 and mu_high >= mu_low");
  }
  DPBudget out;
  out.A = A;
  out.epsilon = (A / 4.0 + R * std::sqrt(mu_high * A) / std::numbers::sqrt2) / mu_low;
  out.delta = std::exp(-R * R / 2.0);
  return out;
}

double RForDelta(double delta_target) {
  if (!(delta_target > 0.0 && delta_target < 1.0)) {
    throw InvalidArgument("dp: delta must lie in (0, 1)");
  }
  return std::sqrt(-2.0 * std::log(delta_target));
}

double DegenerateGaussianLogDensity(const Eigen::VectorXd& y, double sigma_sq,
                                    const Network& net) {
  if (y.size() != net.size()) throw InvalidArgument("density: size mismatch");
  if (!(sigma_sq > 0.0)) throw InvalidArgument("density: sigma^2 must be positive");
  if (std::abs(y.sum()) > 1e-9 * y.norm()) {
    return -std::numeric_limits<double>::infinity();
  }
  const Eigen::VectorXd proj = net.eigenvectors().transpose() * y;
  double quad = 0.0;
  for (int i = 1; i < net.size(); ++i) quad += proj(i) * proj(i) / net.eigenvalues()(i);
  return -0.5 * LogPseudoDeterminant(net, 4.0 * std::numbers::pi * sigma_sq) -
         quad / (4.0 * sigma_sq);
}

MonteCarloDpResult MonteCarloDpCheck(const Network& net, const NoiseConfig& cfg,
                                     const DPParams& params,
                                     const std::vector<double>& f_diff,
                                     int trials, uint64_t seed, int agent) {
  cfg.Validate();
  params.Validate();
  if (cfg.gamma != params.gamma || cfg.p_exp != params.p_exp) {
    throw InvalidArgument("dp: noise config and DP params disagree on gamma or p");
  }
  if (static_cast<int>(f_diff.size()) > cfg.n_terms) {
    throw InvalidArgument("dp: f_diff longer than the perturbed coefficients");
  }
  if (trials < kMinTrials) throw InvalidArgument("dp: need at least 1e4 trials");
  if (agent < 0 || agent >= net.size()) throw InvalidArgument("dp: bad agent");

  MonteCarloDpResult out;
  out.trials = trials;
  out.budget = Budget(ComputeA(f_diff, params), params.R, net.mu_low(), net.mu_high());
  const double delta = out.budget.delta;
  out.contract_limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / trials);

  // L^+ e_agent, and e_agent^T L^+ e_agent.
  const Eigen::MatrixXd l_pinv = PseudoInverse(net);
  const Eigen::VectorXd pinv_col = l_pinv.col(agent);
  const double pinv_diag = l_pinv(agent, agent);
  const double mu_low = net.mu_low();

  int violations = 0;
  int bounded_violations = 0;
  out.max_log_ratio = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const uint64_t trial_seed =
        DeriveSeed(seed, {stream::kTrial, static_cast<uint64_t>(t)});
    const Eigen::MatrixXd eta =
        UnquantizedEtaBar(net, DrawShares(net, cfg, trial_seed), cfg.n_terms);
    double exact = 0.0;
    double linear = 0.0;
    double quadratic = 0.0;
    for (std::size_t idx = 0; idx < f_diff.size(); ++idx) {
      const double xi = f_diff[idx];
      if (xi == 0.0) continue;
      const double s2 = SigmaSquared(cfg, static_cast<int>(idx) + 1);
      const double eta_k = eta(agent, static_cast<Eigen::Index>(idx));
      const double pinv_eta = pinv_col.dot(eta.col(static_cast<Eigen::Index>(idx)));
      exact += (2.0 * xi * pinv_eta + xi * xi * pinv_diag) / (4.0 * s2);
      linear += xi * eta_k / (2.0 * s2);
      quadratic += xi * xi / (4.0 * s2);
    }
    const double bounded = (linear + quadratic) / mu_low;
    if (exact > out.budget.epsilon) ++violations;
    if (bounded > out.budget.epsilon) ++bounded_violations;
    if (exact > bounded + 1e-12 * (1.0 + std::abs(bounded))) ++out.ordering_failures;
    out.max_log_ratio = std::max(out.max_log_ratio, exact);
  }
  out.violation_rate = static_cast<double>(violations) / trials;
  out.bounded_violation_rate = static_cast<double>(bounded_violations) / trials;
  if (f_diff.empty() || out.max_log_ratio == -std::numeric_limits<double>::infinity()) {
    out.max_log_ratio = 0.0;
  }
  return out;
}

}  // namespace efpsn
