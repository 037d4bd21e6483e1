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

// Experiment configuration with a versioned JSON schema.

#ifndef EFPSN_CONFIG_H_
#define EFPSN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "efpsn/attack.h"
#include "efpsn/dataset.h"
#include "efpsn/dp_accounting.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/optimizer.h"
#include "efpsn/polybasis.h"
#include "json.hpp"

namespace efpsn {

inline constexpr int kConfigSchemaVersion = 1;

struct GraphSection {
  std::string spec = "ring_chord";
  int agents = 5;
};

struct ObjectiveSection {
  std::string family = "logistic";  // "logistic" or "quadratic"
  uint64_t dataset_seed = 11;
  MixtureParams mixture{4, 20, 1000, 1.0, 1.0};
  double l2 = 1e-2;
  double test_fraction = 0.2;
  // Quadratic family: dimension of x and the spread of the local minimizers.
  int quadratic_dim = 6;
  double quadratic_spread = 1.0;
};

struct NoiseSection {
  std::vector<double> gammas = {1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4};
  double p_exp = 1.0;
  int precision = 6;
  ZeroSumMode mode = ZeroSumMode::kQuantizeFirst;
  unsigned key_bits = 128;  // bits per Paillier prime
};

struct BasisSection {
  int max_degree = 1;
  int num_vars = 4;
  int num_elements = 5;
  uint64_t seed = 5;
  // Optional fixed orthogonalization order, e.g. {"1", "x1", "x2"}.
  std::vector<std::string> monomials;
  std::string coordinate_map = "bias";  // "bias" or "first"
};

struct OptimizerSection {
  Schedule schedule{0.2, 400, 4e-5, 2000};
  int batch_size = 64;
  uint64_t seed = 3;
  int record_every = 100;
  // Centralized reference run for x*.
  double reference_rate = 0.5;
  int reference_steps = 200000;
  double reference_grad_tol = 1e-10;
};

struct DpSection {
  double q = 2.0;
  double R = 2.0;
  std::vector<double> f_diff = {1.0};
};

struct AttackSection {
  AttackConfig attack{0.1, 300, 17, 0};
  int trials = 20;
  int side = 8;
  int classes = 4;
  double image_noise = 0.05;
  // Weight scale of the attacked model (an early-training snapshot).
  double model_scale = 0.01;
  // The attacked agent's perturbation. By default it is linear in the first 8
  // weights (the top pixel row of class 0), so the noise lands on the pixel
  // gradient. A higher m shrinks each element: the L2 normalization over
  // [-1, 1]^m scales as 2^(-m/2).
  BasisSection basis{1, 8, 9, 7, {}, "first"};
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  uint64_t seed = 1;
  GraphSection graph;
  ObjectiveSection objective;
  NoiseSection noise;
  BasisSection basis;
  OptimizerSection optimizer;
  DpSection dp;
  AttackSection attack;
  std::string output_dir = "out";

  // Throws ConfigError describing the first problem found.
  void Validate() const;

  NoiseConfig Noise(double gamma) const;
  DPParams Dp(double gamma) const;
  BasisParams Basis() const;
};

nlohmann::json ConfigToJson(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys and bad types throw
// ConfigError. The result is validated.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadConfig(const std::string& path);
void SaveConfig(const ExperimentConfig& cfg, const std::string& path);

}  // namespace efpsn

#endif  // EFPSN_CONFIG_H_
