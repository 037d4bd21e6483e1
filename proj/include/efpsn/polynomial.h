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

// Sparse multivariate polynomials over R^m with exact monomial integration on
// the hypercube [-1, 1]^m.

#ifndef EFPSN_POLYNOMIAL_H_
#define EFPSN_POLYNOMIAL_H_

#include <gmpxx.h>

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace efpsn {

// Exponent multi-index, one entry per variable.
using Exponent = std::vector<int>;

class Polynomial {
 public:
  explicit Polynomial(int num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial Monomial(const Exponent& alpha, double coefficient = 1.0);

  // Adds `coefficient` to the term x^alpha; terms that cancel are removed.
  void AddTerm(const Exponent& alpha, double coefficient);
  double Coefficient(const Exponent& alpha) const;

  int num_vars() const { return num_vars_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Maximum total order over stored terms; 0 for the zero polynomial.
  int degree() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scale);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  Polynomial operator*(const Polynomial& other) const;

  double Evaluate(const Eigen::VectorXd& x) const;
  Polynomial Derivative(int var) const;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const;

  // e.g. "2.905x1^2x2 - 0.968x2".
  std::string ToString(int precision = 3) const;

 private:
  int num_vars_;
  std::map<Exponent, double> terms_;
};

int TotalOrder(const Exponent& alpha);

// Integral of x^alpha over [-1, 1]^m: zero if any exponent is odd, otherwise
// prod_j 2 / (alpha_j + 1).
mpq_class MonomialIntegral(const Exponent& alpha);

// L2 inner product on [-1, 1]^m.
double InnerProduct(const Polynomial& p, const Polynomial& q);
double L2Norm(const Polynomial& p);

// Parses "1", "x2", "x1^2*x2", "x1^2x2" into an exponent over m variables
// (1-based variable names).
Exponent ParseMonomial(std::string_view text, int num_vars);
// Comma-separated list of monomials.
std::vector<Exponent> ParseMonomialList(std::string_view text, int num_vars);
std::string MonomialToString(const Exponent& alpha);

}  // namespace efpsn

#endif  // EFPSN_POLYNOMIAL_H_
