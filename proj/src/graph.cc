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

#include "efpsn/graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

bool IsConnected(int n, const std::vector<std::vector<int>>& neighbors) {
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int visited = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : neighbors[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        frontier.push(v);
      }
    }
  }
  return visited == n;
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

SymmetricEigen JacobiEigen(const Eigen::MatrixXd& a, double tolerance,
                           int max_sweeps) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd m = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  auto off_norm = [&] {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p != q) s += m(p, q) * m(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() >= tolerance * scale;
       ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double tau = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return m(i, i) < m(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = m(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

Network Network::Build(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw InvalidArgument("graph: need at least one agent");
  std::set<std::pair<int, int>> unique;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidArgument("graph: edge endpoint out of range");
    }
    if (u == v) throw InvalidArgument("graph: self loops are implicit");
    unique.insert({std::min(u, v), std::max(u, v)});
  }

  Network net;
  net.n_ = n;
  net.edges_.assign(unique.begin(), unique.end());
  net.neighbors_.assign(n, {});
  for (auto [u, v] : net.edges_) {
    net.neighbors_[u].push_back(v);
    net.neighbors_[v].push_back(u);
  }
  for (auto& nb : net.neighbors_) std::sort(nb.begin(), nb.end());
  if (!IsConnected(n, net.neighbors_)) {
    throw DisconnectedGraph("graph: network is disconnected (mu_2 = 0)");
  }

  net.laplacian_ = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : net.edges_) {
    net.laplacian_(u, v) = -1.0;
    net.laplacian_(v, u) = -1.0;
  }
  for (int i = 0; i < n; ++i) net.laplacian_(i, i) = net.degree(i);

  net.spectrum_ = JacobiEigen(net.laplacian_);
  // L 1 = 0 holds structurally.
  if (std::abs(net.spectrum_.values(0)) < 1e-9) net.spectrum_.values(0) = 0.0;
  net.mixing_ = MetropolisWeights(net);
  return net;
}

int Network::max_degree() const {
  int d = 0;
  for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
  return d;
}

Eigen::MatrixXd MetropolisWeights(const Network& net) {
  const int n = net.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : net.edges()) {
    const double weight = 1.0 / (1.0 + std::max(net.degree(u), net.degree(v)));
    w(u, v) = weight;
    w(v, u) = weight;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

Eigen::MatrixXd PseudoInverse(const Network& net) {
  const int n = net.size();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (int i = 1; i < n; ++i) inv(i) = 1.0 / net.eigenvalues()(i);
  const Eigen::MatrixXd& m = net.eigenvectors();
  return m * inv.asDiagonal() * m.transpose();
}

double PseudoDeterminant(const Network& net, double c) {
  return std::exp(LogPseudoDeterminant(net, c));
}

double LogPseudoDeterminant(const Network& net, double c) {
  const int n = net.size();
  double out = (n - 1) * std::log(c);
  for (int i = 1; i < n; ++i) out += std::log(net.eigenvalues()(i));
  return out;
}

Network ErdosRenyi(int n, double p, uint64_t seed) {
  if (p <= 0.0 || p > 1.0) throw InvalidArgument("graph: p must be in (0, 1]");
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng = MakeRng(seed, {static_cast<uint64_t>(attempt)});
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (coin(rng)) edges.emplace_back(u, v);
    try {
      return Network::Build(n, std::move(edges));
    } catch (const DisconnectedGraph&) {
    }
  }
  throw DisconnectedGraph("graph: no connected Erdos-Renyi sample found");
}

Network MakeNetwork(const std::string& raw_spec, int n) {
  const std::string spec = Trim(raw_spec);
  std::vector<std::pair<int, int>> edges;
  if (spec == "path") {
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  } else if (spec == "ring" || spec == "ring_chord") {
    if (n < 3) throw ConfigError("graph: ring needs n >= 3");
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    if (spec == "ring_chord") {
      if (n < 4) throw ConfigError("graph: ring_chord needs n >= 4");
      edges.emplace_back(0, 2);
    }
  } else if (spec == "complete") {
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  } else if (spec == "star") {
    for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
  } else if (spec.rfind("erdos_renyi(", 0) == 0 && spec.back() == ')') {
    std::string args = spec.substr(12, spec.size() - 13);
    std::replace(args.begin(), args.end(), ',', ' ');
    std::istringstream in(args);
    double p = 0.0;
    uint64_t seed = 0;
    if (!(in >> p >> seed)) {
      throw ConfigError("graph: expected erdos_renyi(p, seed)");
    }
    return ErdosRenyi(n, p, seed);
  } else if (spec.rfind("edges:", 0) == 0) {
    std::istringstream in(spec.substr(6));
    std::string item;
    while (std::getline(in, item, ',')) {
      item = Trim(item);
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        throw ConfigError("graph: bad edge '" + item + "'");
      }
      try {
        edges.emplace_back(std::stoi(item.substr(0, dash)),
                           std::stoi(item.substr(dash + 1)));
      } catch (const std::exception&) {
        throw ConfigError("graph: bad edge '" + item + "'");
      }
    }
  } else {
    throw ConfigError("graph: unknown generator '" + spec + "'");
  }
  return Network::Build(n, std::move(edges));
}

}  // namespace efpsn
