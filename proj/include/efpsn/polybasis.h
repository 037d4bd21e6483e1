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

// Orthonormal polynomial systems on [-1, 1]^m and the coefficient <-> function
// maps Phi and Phi^-1.
//
// A system is built from N distinct monomials of total order <= K by
// Gram-Schmidt. Projections are carried out in exact rational arithmetic (all
// monomial integrals are rational); only the final normalization by the
// square root of the squared norm is done in floating point.

#ifndef EFPSN_POLYBASIS_H_
#define EFPSN_POLYBASIS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/polynomial.h"
#include "json.hpp"

namespace efpsn {

// Finitely supported coefficient sequence; entry k-1 multiplies e_k.
using CoefficientVector = std::vector<double>;

struct BasisParams {
  int max_degree = 1;    // K
  int num_vars = 1;      // m
  int num_elements = 1;  // N
  uint64_t seed = 0;
};

class OrthonormalSystem {
 public:
  OrthonormalSystem() = default;
  OrthonormalSystem(BasisParams params, std::vector<Exponent> monomials,
                    std::vector<Polynomial> elements)
      : params_(params),
        monomials_(std::move(monomials)),
        elements_(std::move(elements)) {}

  int size() const { return static_cast<int>(elements_.size()); }
  int num_vars() const { return params_.num_vars; }
  const BasisParams& params() const { return params_; }
  // Source monomials in orthogonalization order.
  const std::vector<Exponent>& monomials() const { return monomials_; }
  const std::vector<Polynomial>& elements() const { return elements_; }
  // 0-based: element(0) is e_1.
  const Polynomial& element(int index) const { return elements_.at(index); }

  Eigen::MatrixXd GramMatrix() const;

 private:
  BasisParams params_;
  std::vector<Exponent> monomials_;
  std::vector<Polynomial> elements_;
};

// All exponents over m variables with total order <= K, graded order.
std::vector<Exponent> EnumerateMonomials(int max_degree, int num_vars);

// Draws N distinct monomials uniformly (rejecting duplicates) and
// orthonormalizes them in draw order. Deterministic given params.seed.
OrthonormalSystem GenerateSystem(const BasisParams& params);

// Orthonormalizes an explicit monomial sequence. Throws InvalidArgument on
// duplicates, on monomials above `max_degree`, or on a dependent candidate.
OrthonormalSystem GenerateSystemFromMonomials(
    const std::vector<Exponent>& monomials, int max_degree);

// Phi(c) = sum_k c_k e_k.
Polynomial Phi(const CoefficientVector& c, const OrthonormalSystem& system);

// c_k = <p, e_k>. Throws InvalidArgument when ||p - Phi(c)|| exceeds
// `residual_tolerance` (p outside the span).
CoefficientVector PhiInverse(const Polynomial& p,
                             const OrthonormalSystem& system,
                             double residual_tolerance = 1e-6);

// {"K","m","N","seed","monomials":[[..]],"elements":[[{"exponents":[..],
// "coefficient":x},..],..]}
nlohmann::json SystemToJson(const OrthonormalSystem& system);
OrthonormalSystem SystemFromJson(const nlohmann::json& j);

}  // namespace efpsn

#endif  // EFPSN_POLYBASIS_H_
