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

// Gradient-inversion attack (DLG with iDLG label inference) against a
// single-layer softmax model, with and without functional perturbation.

#ifndef EFPSN_ATTACK_H_
#define EFPSN_ATTACK_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/graph.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/objectives.h"
#include "efpsn/paillier.h"
#include "efpsn/polybasis.h"

namespace efpsn {

// Parameters of softmax(W x + b), laid out as LogisticObjective does.
struct LinearSoftmax {
  int classes = 0;
  int features = 0;
  Eigen::VectorXd theta;

  // Small N(0, scale^2) weights and biases.
  static LinearSoftmax Random(int classes, int features, double scale,
                              uint64_t seed);
  // Single-sample cross-entropy gradient.
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x, int label) const;
};

struct AttackConfig {
  double alpha = 0.1;
  int iterations = 300;
  uint64_t seed = 0;
  // Keep a reconstruction every this many iterations (0 disables).
  int snapshot_every = 0;

  // Throws InvalidArgument.
  void Validate() const;
};

struct AttackResult {
  Eigen::VectorXd x;           // reconstruction
  int label = -1;              // inferred (iDLG) or argmax of the soft label
  bool label_from_signs = false;
  std::vector<double> loss;    // D at each iteration, before the update
  std::vector<double> mse;     // input MSE at each iteration (when known)
  double final_loss = 0.0;
  double final_mse = 0.0;      // NaN without ground truth
  bool diverged = false;
  std::vector<std::pair<int, Eigen::VectorXd>> snapshots;
};

// The unique class whose bias-gradient entry is negative, or nullopt when
// there are zero or several.
std::optional<int> IdlgLabel(const Eigen::VectorXd& bias_gradient);

// Gradient descent on D = ||grad(x', y') - target||^2 over the full parameter
// gradient. The label is fixed by IdlgLabel when it applies; otherwise a soft
// label softmax(y') is optimized jointly. Stops and flags divergence once
// ||x'|| > 1e6.
AttackResult DlgAttack(const LinearSoftmax& model,
                       const Eigen::VectorXd& target_grad,
                       const AttackConfig& cfg,
                       const std::optional<Eigen::VectorXd>& truth = std::nullopt);

// Everything needed to run Phase I for the attacked agent.
struct PerturbationSetup {
  Network net = Network::Build(1, {});
  NoiseConfig noise;  // gamma is overridden per sweep point
  OrthonormalSystem basis;
  CoordinateMap map;
  std::vector<Keypair> keyring;
  uint64_t seed = 0;
  int agent = 0;
  // false: independent non-zero-sum noise instead of Phase I.
  bool zero_sum = true;
};

struct SweepPoint {
  double gamma = 0.0;
  AttackResult result;
};

// For each gamma, builds the agent's perturbed single-sample objective from a
// fresh Phase I run (gamma = 0 means no perturbation) and attacks its gradient
// at the model parameters. The attacker never sees the perturbation.
std::vector<SweepPoint> AttackUnderPerturbation(
    const LinearSoftmax& model, const Eigen::VectorXd& x, int label,
    const std::vector<double>& gammas, const PerturbationSetup& setup,
    const AttackConfig& cfg);

// Writes a side x side 8-bit PGM, clamping values to [0, 1].
void WritePgm(const Eigen::VectorXd& image, int side, const std::string& path);

}  // namespace efpsn

#endif  // EFPSN_ATTACK_H_
