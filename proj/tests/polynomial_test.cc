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

#include "efpsn/polynomial.h"

#include <cmath>
#include <random>
#include <vector>

#include "efpsn/errors.h"
#include "gtest/gtest.h"

namespace efpsn {
namespace {

Polynomial RandomPolynomial(int m, int max_order, int terms,
                            std::mt19937_64& gen) {
  std::uniform_int_distribution<int> exp_dist(0, max_order);
  std::normal_distribution<double> normal;
  Polynomial p(m);
  for (int t = 0; t < terms; ++t) {
    Exponent alpha(m);
    for (int& a : alpha) a = exp_dist(gen);
    p.AddTerm(alpha, normal(gen));
  }
  return p;
}

TEST(MonomialIntegralTest, KnownValues) {
  EXPECT_EQ(MonomialIntegral({0, 0}), 4);
  EXPECT_EQ(MonomialIntegral({1, 0}), 0);
  EXPECT_EQ(MonomialIntegral({2, 0}), mpq_class(4, 3));
  EXPECT_EQ(MonomialIntegral({2, 4}), mpq_class(4, 15));
  EXPECT_EQ(MonomialIntegral({0, 0, 0}), 8);
  EXPECT_THROW(MonomialIntegral({-1}), InvalidArgument);
}

TEST(MonomialIntegralTest, MatchesGaussLegendreQuadrature) {
  // Five-point rule is exact through degree 9 per variable.
  const double nodes[] = {0.0, -0.5384693101056831, 0.5384693101056831,
                          -0.9061798459386640, 0.9061798459386640};
  const double weights[] = {0.5688888888888889, 0.4786286704993665,
                            0.4786286704993665, 0.2369268850561891,
                            0.2369268850561891};
  for (int a = 0; a <= 6; ++a) {
    for (int b = 0; b <= 6; ++b) {
      double q = 0.0;
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          q += weights[i] * weights[j] * std::pow(nodes[i], a) *
               std::pow(nodes[j], b);
        }
      }
      EXPECT_NEAR(MonomialIntegral({a, b}).get_d(), q, 1e-12);
    }
  }
}

TEST(PolynomialTest, NoZeroTermsStored) {
  Polynomial p(2);
  p.AddTerm({1, 0}, 2.0);
  p.AddTerm({1, 0}, -2.0);
  EXPECT_TRUE(p.is_zero());
  p.AddTerm({0, 1}, 0.0);
  EXPECT_TRUE(p.terms().empty());
  EXPECT_EQ(p.degree(), 0);
}

TEST(PolynomialTest, DegreeIsMaxTotalOrder) {
  Polynomial p(2);
  p.AddTerm({2, 1}, 1.0);
  p.AddTerm({0, 1}, 1.0);
  EXPECT_EQ(p.degree(), 3);
}

TEST(PolynomialTest, EvaluateAndGradient) {
  const Polynomial p = Polynomial::Monomial({2, 1});
  Eigen::Vector2d x(2.0, 3.0);
  EXPECT_DOUBLE_EQ(p.Evaluate(x), 12.0);
  const Eigen::VectorXd g = p.Gradient(x);
  EXPECT_DOUBLE_EQ(g(0), 12.0);
  EXPECT_DOUBLE_EQ(g(1), 4.0);
  EXPECT_THROW(p.Evaluate(Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(PolynomialTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 4;
    const Polynomial p = RandomPolynomial(m, 3, 6, gen);
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = unif(gen);
    const Eigen::VectorXd g = p.Gradient(x);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd up = x, down = x;
      up(i) += h;
      down(i) -= h;
      const double fd = (p.Evaluate(up) - p.Evaluate(down)) / (2 * h);
      EXPECT_NEAR(g(i), fd, 1e-6);
    }
  }
}

TEST(PolynomialTest, ArithmeticIsConsistentWithEvaluation) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial p = RandomPolynomial(2, 3, 4, gen);
    const Polynomial q = RandomPolynomial(2, 3, 4, gen);
    const Eigen::Vector2d x(0.3, -0.7);
    EXPECT_NEAR((p + q).Evaluate(x), p.Evaluate(x) + q.Evaluate(x), 1e-12);
    EXPECT_NEAR((p - q).Evaluate(x), p.Evaluate(x) - q.Evaluate(x), 1e-12);
    EXPECT_NEAR((p * q).Evaluate(x), p.Evaluate(x) * q.Evaluate(x), 1e-11);
    EXPECT_NEAR((2.5 * p).Evaluate(x), 2.5 * p.Evaluate(x), 1e-12);
  }
  EXPECT_THROW(Polynomial(2) + Polynomial(3), InvalidArgument);
}

TEST(InnerProductTest, KnownValues) {
  const Polynomial one = Polynomial::Monomial({0, 0});
  const Polynomial x1 = Polynomial::Monomial({1, 0});
  const Polynomial x2 = Polynomial::Monomial({0, 1});
  EXPECT_DOUBLE_EQ(InnerProduct(one, one), 4.0);
  EXPECT_DOUBLE_EQ(1.0 / L2Norm(one), 0.5);
  EXPECT_DOUBLE_EQ(InnerProduct(x2, x2), 4.0 / 3.0);
  EXPECT_NEAR(1.0 / L2Norm(x2), 0.866, 5e-4);
  EXPECT_EQ(InnerProduct(x1, x2), 0.0);
}

TEST(ParseTest, Monomials) {
  EXPECT_EQ(ParseMonomial("1", 2), (Exponent{0, 0}));
  EXPECT_EQ(ParseMonomial("x2", 2), (Exponent{0, 1}));
  EXPECT_EQ(ParseMonomial("x1^2*x2", 2), (Exponent{2, 1}));
  EXPECT_EQ(ParseMonomial("x1^2x2", 2), (Exponent{2, 1}));
  EXPECT_EQ(ParseMonomialList("1,x2,x2^3", 2).size(), 3u);
  EXPECT_THROW(ParseMonomial("x3", 2), ConfigError);
  EXPECT_THROW(ParseMonomial("y1", 2), ConfigError);
  EXPECT_THROW(ParseMonomial("", 2), ConfigError);
  EXPECT_EQ(MonomialToString({2, 1}), "x1^2x2");
}

TEST(ToStringTest, PaperStyle) {
  Polynomial p(2);
  p.AddTerm({2, 1}, 2.905);
  p.AddTerm({0, 1}, -0.968);
  EXPECT_EQ(p.ToString(), "2.905x1^2x2 - 0.968x2");
  EXPECT_EQ(Polynomial(2).ToString(), "0");
}

}  // namespace
}  // namespace efpsn
