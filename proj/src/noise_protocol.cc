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

#include "efpsn/noise_protocol.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

int64_t ToInt64(const BigInt& v) {
  if (!mpz_fits_slong_p(v.get_mpz_t())) {
    throw PlaintextOverflow("noise: fixed-point value exceeds 64 bits");
  }
  return static_cast<int64_t>(v.get_si());
}

std::vector<int> ResolveOrder(int n, const std::vector<int>& requested) {
  if (requested.empty()) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return order;
  }
  std::vector<int> sorted = requested;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(sorted.size()) != n || sorted[i] != i) {
      throw InvalidArgument("noise: agent_order must be a permutation of 0..n-1");
    }
  }
  return requested;
}

void SeedNonceStream(gmp_randclass& rng, uint64_t seed, int from, int to,
                     int k) {
  rng.seed(BigInt(static_cast<unsigned long>(DeriveSeed(
      seed, {stream::kEncryptionNonce, static_cast<uint64_t>(from),
             static_cast<uint64_t>(to), static_cast<uint64_t>(k)}))));
}

}  // namespace

std::string ZeroSumModeName(ZeroSumMode mode) {
  return mode == ZeroSumMode::kQuantizeFirst ? "quantize_first" : "paper_faithful";
}

ZeroSumMode ParseZeroSumMode(const std::string& name) {
  if (name == "quantize_first") return ZeroSumMode::kQuantizeFirst;
  if (name == "paper_faithful") return ZeroSumMode::kPaperFaithful;
  throw ConfigError("noise: unknown mode '" + name + "'");
}

void NoiseConfig::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("noise: gamma must be positive");
  }
  if (!std::isfinite(p_exp)) throw ConfigError("noise: p must be finite");
  if (n_terms < 1) throw ConfigError("noise: n_terms must be >= 1");
  if (precision < 1 || precision > 18) {
    throw ConfigError("noise: precision order must be in [1, 18]");
  }
}

double SigmaSquared(const NoiseConfig& cfg, int k) {
  if (k < 1) throw InvalidArgument("noise: coefficient index k starts at 1");
  return cfg.gamma / std::pow(static_cast<double>(k), cfg.p_exp);
}

std::vector<PairShares> DrawShares(const Network& net, const NoiseConfig& cfg,
                                   uint64_t seed) {
  std::vector<double> sigma(cfg.n_terms);
  for (int k = 1; k <= cfg.n_terms; ++k) sigma[k - 1] = std::sqrt(SigmaSquared(cfg, k));
  std::vector<PairShares> out;
  out.reserve(net.directed_edge_count());
  for (int i = 0; i < net.size(); ++i) {
    for (int j : net.neighbors(i)) {
      PairShares pair{i, j, std::vector<double>(cfg.n_terms)};
      for (int k = 1; k <= cfg.n_terms; ++k) {
        Rng rng = MakeRng(seed, {stream::kNoiseShare, static_cast<uint64_t>(i),
                                 static_cast<uint64_t>(j), static_cast<uint64_t>(k)});
        std::normal_distribution<double> normal(0.0, sigma[k - 1]);
        pair.values[k - 1] = normal(rng);
      }
      out.push_back(std::move(pair));
    }
  }
  return out;
}

Eigen::MatrixXd UnquantizedEtaBar(const Network& net,
                                  const std::vector<PairShares>& shares,
                                  int n_terms) {
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(net.size(), n_terms);
  for (const PairShares& pair : shares) {
    for (int k = 0; k < n_terms; ++k) {
      eta(pair.from, k) += pair.values[k];
      eta(pair.to, k) -= pair.values[k];
    }
  }
  return eta;
}

nlohmann::json TranscriptToJson(const Transcript& t) {
  nlohmann::json messages = nlohmann::json::array();
  for (const TranscriptEntry& e : t.messages) {
    messages.push_back({{"from", e.from},
                        {"to", e.to},
                        {"k", e.k},
                        {"ciphertext", e.ciphertext},
                        {"quantized", e.quantized}});
  }
  nlohmann::json aggregates = nlohmann::json::array();
  for (const AggregateEntry& a : t.aggregates) {
    aggregates.push_back({{"agent", a.agent},
                          {"k", a.k},
                          {"product_ciphertext", a.product_ciphertext},
                          {"decrypted_sum", a.decrypted_sum}});
  }
  return {{"precision", t.precision},
          {"messages", std::move(messages)},
          {"aggregates", std::move(aggregates)}};
}

std::vector<Keypair> GenerateKeyring(int n, unsigned bit_length, uint64_t seed,
                                     GeneratorMode mode) {
  std::vector<Keypair> ring;
  ring.reserve(n);
  for (int i = 0; i < n; ++i) {
    ring.push_back(GenerateKeypair(
        bit_length, DeriveSeed(seed, {static_cast<uint64_t>(i)}), mode));
  }
  return ring;
}

PerturbationCoefficients RunPhase1(const Network& net, const NoiseConfig& cfg,
                                   const std::vector<Keypair>& keyring,
                                   uint64_t seed, const Phase1Options& options) {
  cfg.Validate();
  const int n = net.size();
  const int terms = cfg.n_terms;
  if (static_cast<int>(keyring.size()) != n) {
    throw InvalidArgument("noise: missing keypair for some agent");
  }
  const std::vector<int> order = ResolveOrder(n, options.agent_order);
  const std::vector<PairShares> shares = DrawShares(net, cfg, seed);

  // Shares grouped by sender.
  std::vector<std::vector<const PairShares*>> outgoing(n);
  for (const PairShares& pair : shares) outgoing[pair.from].push_back(&pair);

  // Round 1: every agent encrypts its shares for each neighbor.
  // mailbox[receiver][k-1] holds the ciphertexts addressed to it.
  std::vector<std::vector<std::vector<Ciphertext>>> mailbox(
      n, std::vector<std::vector<Ciphertext>>(terms));
  std::vector<std::vector<int64_t>> sent_fixed(n, std::vector<int64_t>(terms, 0));
  Eigen::MatrixXd sent_real = Eigen::MatrixXd::Zero(n, terms);
  std::map<std::tuple<int, int, int>, TranscriptEntry> messages;

  for (int i : order) {
    for (const PairShares* pair : outgoing[i]) {
      const int j = pair->to;
      const PublicKey& pk = keyring[j].pub;
      // Every sender stays below f / (2 deg j), so the receiver's sum of
      // deg j shares cannot wrap past f/2.
      const BigInt limit = pk.f / (2 * std::max(1, net.degree(j)));
      for (int k = 1; k <= terms; ++k) {
        const double eta = pair->values[k - 1];
        const BigInt q = QuantizeFloor(eta, cfg.precision);
        if (abs(q) >= limit) {
          throw PlaintextOverflow(
              "noise: share for agent " + std::to_string(j) +
              " too large for its key; raise the key size or lower P");
        }
        gmp_randclass nonce_rng(gmp_randinit_mt);
        SeedNonceStream(nonce_rng, seed, i, j, k);
        const BigInt r = SampleNonce(pk, nonce_rng);
        Ciphertext c = Encrypt(EncodeSigned(q, pk.f), pk, r);
        const int64_t q64 = ToInt64(q);
        sent_fixed[i][k - 1] += q64;
        sent_real(i, k - 1) += eta;
        if (options.audit) {
          messages[{i, j, k}] = TranscriptEntry{i, j, k, CiphertextToString(c), q64};
        }
        mailbox[j][k - 1].push_back(std::move(c));
      }
    }
  }

  // Round 2: one homomorphic aggregation and one decryption per k.
  PerturbationCoefficients out;
  out.eta_bar = Eigen::MatrixXd::Zero(n, terms);
  const bool exact = cfg.mode == ZeroSumMode::kQuantizeFirst;
  if (exact) out.fixed_point.assign(n, std::vector<int64_t>(terms, 0));
  std::map<std::pair<int, int>, AggregateEntry> aggregates;
  const double scale = std::pow(10.0, cfg.precision);

  for (int i : order) {
    const Keypair& kp = keyring[i];
    for (int k = 1; k <= terms; ++k) {
      const auto& inbox = mailbox[i][k - 1];
      int64_t received = 0;
      std::string product_text = "1";
      if (!inbox.empty()) {
        const Ciphertext product = HomomorphicAdd(inbox, kp.pub);
        received = ToInt64(DecodeSigned(Decrypt(product, kp), kp.f()));
        product_text = CiphertextToString(product);
      }
      if (exact) {
        const int64_t fixed = sent_fixed[i][k - 1] - received;
        out.fixed_point[i][k - 1] = fixed;
        out.eta_bar(i, k - 1) = static_cast<double>(fixed) / scale;
      } else {
        out.eta_bar(i, k - 1) =
            sent_real(i, k - 1) - static_cast<double>(received) / scale;
      }
      if (options.audit) {
        aggregates[{i, k}] = AggregateEntry{i, k, product_text, received};
      }
    }
  }

  if (options.audit) {
    Transcript t;
    t.precision = cfg.precision;
    for (auto& [key, entry] : messages) t.messages.push_back(std::move(entry));
    for (auto& [key, entry] : aggregates) t.aggregates.push_back(std::move(entry));
    out.transcript = std::move(t);
  }
  return out;
}

Eigen::MatrixXd ReplayFromTranscript(const Network& net, const NoiseConfig& cfg,
                                     const std::vector<PairShares>& shares,
                                     const Transcript& transcript) {
  const int n = net.size();
  const double scale = std::pow(10.0, transcript.precision);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, cfg.n_terms);
  for (const PairShares& pair : shares) {
    for (int k = 1; k <= cfg.n_terms; ++k) {
      const double v = pair.values[k - 1];
      eta(pair.from, k - 1) +=
          cfg.mode == ZeroSumMode::kQuantizeFirst
              ? static_cast<double>(ToInt64(QuantizeFloor(v, transcript.precision)))
              : v;
    }
  }
  for (const AggregateEntry& a : transcript.aggregates) {
    if (cfg.mode == ZeroSumMode::kQuantizeFirst) {
      eta(a.agent, a.k - 1) -= static_cast<double>(a.decrypted_sum);
    } else {
      eta(a.agent, a.k - 1) -= static_cast<double>(a.decrypted_sum) / scale;
    }
  }
  if (cfg.mode == ZeroSumMode::kQuantizeFirst) eta /= scale;
  return eta;
}

std::vector<Eigen::MatrixXd> EmpiricalCovariance(const Network& net,
                                                 const NoiseConfig& cfg,
                                                 int trials, uint64_t seed) {
  cfg.Validate();
  if (trials < 2) throw InvalidArgument("noise: need at least two trials");
  const int n = net.size();
  std::vector<Eigen::VectorXd> sum(cfg.n_terms, Eigen::VectorXd::Zero(n));
  std::vector<Eigen::MatrixXd> outer(cfg.n_terms, Eigen::MatrixXd::Zero(n, n));
  for (int t = 0; t < trials; ++t) {
    const auto shares =
        DrawShares(net, cfg, DeriveSeed(seed, {stream::kTrial, static_cast<uint64_t>(t)}));
    const Eigen::MatrixXd eta = UnquantizedEtaBar(net, shares, cfg.n_terms);
    for (int k = 0; k < cfg.n_terms; ++k) {
      const Eigen::VectorXd col = eta.col(k);
      sum[k] += col;
      outer[k].noalias() += col * col.transpose();
    }
  }
  std::vector<Eigen::MatrixXd> cov(cfg.n_terms);
  for (int k = 0; k < cfg.n_terms; ++k) {
    const Eigen::VectorXd mean = sum[k] / trials;
    cov[k] = (outer[k] - trials * mean * mean.transpose()) / (trials - 1);
  }
  return cov;
}

PerturbationCoefficients NonzeroSumBaseline(int n, const NoiseConfig& cfg,
                                            uint64_t seed) {
  cfg.Validate();
  PerturbationCoefficients out;
  out.eta_bar.resize(n, cfg.n_terms);
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= cfg.n_terms; ++k) {
      Rng rng = MakeRng(seed, {stream::kBaseline, static_cast<uint64_t>(i),
                               static_cast<uint64_t>(k)});
      std::normal_distribution<double> normal(0.0, std::sqrt(SigmaSquared(cfg, k)));
      out.eta_bar(i, k - 1) = normal(rng);
    }
  }
  return out;
}

}  // namespace efpsn
