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

// Phase I: encrypted pairwise exchange of Gaussian noise shares producing
// zero-sum perturbation coefficients.
//
// For every agent i, neighbor j != i and coefficient index k = 1..N, agent i
// draws eta_ijk ~ N(0, gamma / k^p), quantizes q_ijk = floor(10^P eta_ijk),
// encrypts q_ijk under j's public key and sends it. Agent j multiplies the
// ciphertexts it received for each k and decrypts once, obtaining
// sum_i q_ijk. Each agent then sets
//
//   eta_bar_ik = sum_j sent_ijk - 10^-P * sum_j q_jik
//
// where sent_ijk is q_ijk * 10^-P (quantize-first) or eta_ijk itself
// (paper_faithful mode). Quantize-first makes sum_i eta_bar_ik = 0 exactly in
// fixed point.

#ifndef EFPSN_NOISE_PROTOCOL_H_
#define EFPSN_NOISE_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/graph.h"
#include "efpsn/paillier.h"
#include "json.hpp"

namespace efpsn {

enum class ZeroSumMode { kQuantizeFirst, kPaperFaithful };

std::string ZeroSumModeName(ZeroSumMode mode);
ZeroSumMode ParseZeroSumMode(const std::string& name);

struct NoiseConfig {
  double gamma = 1.0;   // noise magnitude
  double p_exp = 1.0;   // decay exponent: sigma_k^2 = gamma / k^p
  int n_terms = 1;      // perturbed coefficients, k = 1..n_terms
  int precision = 6;    // fixed-point order P
  ZeroSumMode mode = ZeroSumMode::kQuantizeFirst;

  // Throws ConfigError.
  void Validate() const;
};

// gamma / k^p for k >= 1.
double SigmaSquared(const NoiseConfig& cfg, int k);

// Plaintext noise eta_{from,to,k} for one ordered neighbor pair.
struct PairShares {
  int from = 0;
  int to = 0;
  std::vector<double> values;  // index k-1
};

// Draws every ordered pair's shares. The stream for (i, j, k) is derived
// from (seed, i, j, k) only.
std::vector<PairShares> DrawShares(const Network& net, const NoiseConfig& cfg,
                                   uint64_t seed);

// eta_ik = sum_j eta_ijk - sum_j eta_jik without quantization (n x N).
Eigen::MatrixXd UnquantizedEtaBar(const Network& net,
                                  const std::vector<PairShares>& shares,
                                  int n_terms);

// One message of the exchange, recorded in audit mode.
struct TranscriptEntry {
  int from = 0;
  int to = 0;
  int k = 0;  // 1-based
  std::string ciphertext;
  int64_t quantized = 0;
};

// Output of one homomorphic aggregation at the receiver.
struct AggregateEntry {
  int agent = 0;
  int k = 0;
  std::string product_ciphertext;
  int64_t decrypted_sum = 0;
};

struct Transcript {
  int precision = 0;
  std::vector<TranscriptEntry> messages;
  std::vector<AggregateEntry> aggregates;
};

nlohmann::json TranscriptToJson(const Transcript& t);

struct PerturbationCoefficients {
  // Row i is eta_bar_i (length N).
  Eigen::MatrixXd eta_bar;
  // Quantize-first only: eta_bar * 10^P as exact integers.
  std::vector<std::vector<int64_t>> fixed_point;
  std::optional<Transcript> transcript;
};

struct Phase1Options {
  bool audit = false;
  // Order in which agents run inside each round; empty means 0..n-1.
  std::vector<int> agent_order;
};

// One keypair per agent; agent i's seed is derived from (seed, i).
std::vector<Keypair> GenerateKeyring(int n, unsigned bit_length, uint64_t seed,
                                     GeneratorMode mode = GeneratorMode::kSimple);

// Runs the two barrier rounds (send, then aggregate + decrypt). Throws
// PlaintextOverflow when a share could push a receiver's sum past f/2,
// InvalidArgument when the keyring does not cover every agent.
PerturbationCoefficients RunPhase1(const Network& net, const NoiseConfig& cfg,
                                   const std::vector<Keypair>& keyring,
                                   uint64_t seed,
                                   const Phase1Options& options = {});

// Recomputes eta_bar from an audit transcript and the senders' own shares
// only (no plaintext of received messages).
Eigen::MatrixXd ReplayFromTranscript(const Network& net, const NoiseConfig& cfg,
                                     const std::vector<PairShares>& shares,
                                     const Transcript& transcript);

// Sample covariance of the unquantized eta_bar_k over `trials` independent
// draws; one n x n matrix per k.
std::vector<Eigen::MatrixXd> EmpiricalCovariance(const Network& net,
                                                 const NoiseConfig& cfg,
                                                 int trials, uint64_t seed);

// Non-zero-sum comparison mechanism: eta_bar_ik ~ N(0, sigma_k^2)
// independently, no exchange.
PerturbationCoefficients NonzeroSumBaseline(int n, const NoiseConfig& cfg,
                                            uint64_t seed);

}  // namespace efpsn

#endif  // EFPSN_NOISE_PROTOCOL_H_
