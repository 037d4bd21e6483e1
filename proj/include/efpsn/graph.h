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

#ifndef EFPSN_GRAPH_H_
#define EFPSN_GRAPH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace efpsn {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns are orthonormal eigenvectors
};

// Cyclic Jacobi rotations. Iterates until the off-diagonal Frobenius norm
// drops below `tolerance` (scaled by max(1, ||A||_F)).
SymmetricEigen JacobiEigen(const Eigen::MatrixXd& a, double tolerance = 1e-12,
                           int max_sweeps = 100);

// Undirected, connected agent network.
//
// Two matrices coexist: the Laplacian of the unweighted adjacency, which is
// the covariance shape of the exchanged noise, and the Metropolis mixing
// matrix used for consensus averaging.
class Network {
 public:
  // Throws InvalidArgument on bad endpoints or self loops, DisconnectedGraph
  // when the graph has more than one component.
  static Network Build(int n, std::vector<std::pair<int, int>> edges);

  int size() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Neighbors of i, excluding i itself, ascending.
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  int max_degree() const;
  // Ordered neighbor pairs (i, j), i != j.
  int directed_edge_count() const { return 2 * static_cast<int>(edges_.size()); }

  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  const Eigen::MatrixXd& mixing() const { return mixing_; }
  const Eigen::VectorXd& eigenvalues() const { return spectrum_.values; }
  const Eigen::MatrixXd& eigenvectors() const { return spectrum_.vectors; }

  // Second smallest and largest Laplacian eigenvalue.
  double mu_low() const { return spectrum_.values(1 < n_ ? 1 : 0); }
  double mu_high() const { return spectrum_.values(n_ - 1); }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> neighbors_;
  Eigen::MatrixXd laplacian_;
  Eigen::MatrixXd mixing_;
  SymmetricEigen spectrum_;
};

// w_ij = 1 / (1 + max(deg i, deg j)) on edges, w_ii = 1 - sum_{j != i} w_ij.
Eigen::MatrixXd MetropolisWeights(const Network& net);

// M Diag(0, 1/mu_2, ..., 1/mu_n) M^T.
Eigen::MatrixXd PseudoInverse(const Network& net);

// det*(c L) = c^(n-1) * prod_{i>=2} mu_i, and its logarithm.
double PseudoDeterminant(const Network& net, double c);
double LogPseudoDeterminant(const Network& net, double c);

// Named generators: "path", "ring", "complete", "star", "ring_chord" (ring
// plus the chord 0-2), "erdos_renyi(p, seed)", or an explicit edge list
// "edges:0-1,1-2,...".
Network MakeNetwork(const std::string& spec, int n);

// Connected G(n, p) sample; resamples up to a fixed budget.
Network ErdosRenyi(int n, double p, uint64_t seed);

}  // namespace efpsn

#endif  // EFPSN_GRAPH_H_
