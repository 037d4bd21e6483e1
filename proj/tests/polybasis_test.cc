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

#include "efpsn/polybasis.h"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "efpsn/errors.h"
#include "gtest/gtest.h"

namespace efpsn {
namespace {

// Worked example system in fixed-list mode.
OrthonormalSystem ExampleSystem() {
  return GenerateSystemFromMonomials(
      ParseMonomialList("1,x2,x2^3,x1,x1^2x2", 2), 3);
}

double MaxGramError(const OrthonormalSystem& sys) {
  const int n = sys.size();
  return (sys.GramMatrix() - Eigen::MatrixXd::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

TEST(PolybasisTest, ExampleSystemMatchesReferenceCoefficients) {
  const OrthonormalSystem sys = ExampleSystem();
  ASSERT_EQ(sys.size(), 5);
  EXPECT_NEAR(sys.element(0).Coefficient({0, 0}), 0.5, 1e-2);
  EXPECT_NEAR(sys.element(1).Coefficient({0, 1}), 0.866, 1e-2);
  EXPECT_NEAR(sys.element(2).Coefficient({0, 3}), 3.307, 1e-2);
  EXPECT_NEAR(sys.element(2).Coefficient({0, 1}), -1.984, 1e-2);
  EXPECT_NEAR(sys.element(3).Coefficient({1, 0}), 0.866, 1e-2);
  EXPECT_NEAR(sys.element(4).Coefficient({2, 1}), 2.905, 1e-2);
  EXPECT_NEAR(sys.element(4).Coefficient({0, 1}), -0.968, 1e-2);
  EXPECT_EQ(sys.element(2).terms().size(), 2u);
  EXPECT_EQ(sys.element(4).terms().size(), 2u);
  EXPECT_EQ(sys.element(4).ToString(), "2.905x1^2x2 - 0.968x2");
}

TEST(PolybasisTest, ExampleSystemMatchesLegendreClosedForm) {
  // Normalized Legendre products on [-1,1]^2:
  //   e3 = sqrt(7)/2 * (5x^3 - 3x)/2,  e5 = sqrt(135/16) (x1^2 - 1/3) x2.
  const OrthonormalSystem sys = ExampleSystem();
  const double c3 = std::sqrt(7.0) / 4.0;
  EXPECT_NEAR(sys.element(2).Coefficient({0, 3}), 5 * c3, 1e-12);
  EXPECT_NEAR(sys.element(2).Coefficient({0, 1}), -3 * c3, 1e-12);
  const double c5 = std::sqrt(135.0 / 16.0);
  EXPECT_NEAR(sys.element(4).Coefficient({2, 1}), c5, 1e-12);
  EXPECT_NEAR(sys.element(4).Coefficient({0, 1}), -c5 / 3.0, 1e-12);
  EXPECT_NEAR(sys.element(1).Coefficient({0, 1}), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(PolybasisTest, OneDimensionalHandIntegration) {
  const OrthonormalSystem sys =
      GenerateSystemFromMonomials(ParseMonomialList("1,x1", 1), 1);
  EXPECT_NEAR(sys.element(0).Coefficient({0}), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sys.element(1).Coefficient({1}), std::sqrt(1.5), 1e-15);
}

TEST(PolybasisTest, FixedListRejectsBadInput) {
  EXPECT_THROW(GenerateSystemFromMonomials({{0, 0}, {0, 0}}, 1),
               InvalidArgument);
  EXPECT_THROW(GenerateSystemFromMonomials({{2, 0}}, 1), InvalidArgument);
  EXPECT_THROW(GenerateSystemFromMonomials({}, 1), InvalidArgument);
  EXPECT_THROW(GenerateSystemFromMonomials({{0, 0}, {1}}, 1), InvalidArgument);
}

TEST(PolybasisTest, EnumerateMonomialsCount) {
  // C(K + m, m).
  EXPECT_EQ(EnumerateMonomials(3, 2).size(), 10u);
  EXPECT_EQ(EnumerateMonomials(1, 8).size(), 9u);
  EXPECT_EQ(EnumerateMonomials(2, 3).size(), 10u);
  EXPECT_EQ(EnumerateMonomials(0, 4).size(), 1u);
}

TEST(PolybasisTest, GeneratedSystemsAreOrthonormal) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    BasisParams params;
    params.max_degree = 1 + seed % 4;
    params.num_vars = 1 + seed % 3;
    params.num_elements =
        static_cast<int>(EnumerateMonomials(params.max_degree, params.num_vars)
                             .size());
    params.num_elements = std::max(1, params.num_elements - static_cast<int>(seed % 3));
    params.seed = seed;
    const OrthonormalSystem sys = GenerateSystem(params);
    EXPECT_EQ(sys.size(), params.num_elements);
    EXPECT_LE(MaxGramError(sys), 1e-9);
    std::set<Exponent> distinct(sys.monomials().begin(), sys.monomials().end());
    EXPECT_EQ(distinct.size(), sys.monomials().size());
    for (const Polynomial& e : sys.elements()) {
      EXPECT_LE(e.degree(), params.max_degree);
    }
  }
}

TEST(PolybasisTest, GenerationIsDeterministic) {
  const BasisParams params{3, 2, 5, 77};
  const OrthonormalSystem a = GenerateSystem(params);
  const OrthonormalSystem b = GenerateSystem(params);
  EXPECT_EQ(a.monomials(), b.monomials());
  for (int k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.element(k).terms(), b.element(k).terms());
  }
}

TEST(PolybasisTest, GenerateRejectsTooManyElements) {
  EXPECT_THROW(GenerateSystem({1, 2, 4, 0}), InvalidArgument);
  EXPECT_THROW(GenerateSystem({1, 0, 1, 0}), InvalidArgument);
}

TEST(PhiTest, ZeroAndUnitVectors) {
  const OrthonormalSystem sys = ExampleSystem();
  EXPECT_TRUE(Phi({0, 0, 0, 0, 0}, sys).is_zero());
  for (int k = 0; k < 5; ++k) {
    CoefficientVector c(5, 0.0);
    c[k] = 1.0;
    EXPECT_EQ(Phi(c, sys).terms(), sys.element(k).terms());
  }
  EXPECT_THROW(Phi({1.0}, sys), InvalidArgument);
}

TEST(PhiTest, ExampleExpansion) {
  const OrthonormalSystem sys = ExampleSystem();
  const CoefficientVector c = {0.180, 0.628, -0.374, 0.817, 2.015};
  const Polynomial p = Phi(c, sys);
  // Term-by-term expansion from the Legendre closed forms.
  const double c3 = std::sqrt(7.0) / 4.0;
  const double c5 = std::sqrt(135.0 / 16.0);
  const double s3 = std::sqrt(3.0) / 2.0;
  EXPECT_NEAR(p.Coefficient({0, 0}), 0.180 * 0.5, 1e-12);
  EXPECT_NEAR(p.Coefficient({1, 0}), 0.817 * s3, 1e-12);
  EXPECT_NEAR(p.Coefficient({2, 1}), 2.015 * c5, 1e-12);
  EXPECT_NEAR(p.Coefficient({0, 3}), -0.374 * 5 * c3, 1e-12);
  EXPECT_NEAR(p.Coefficient({0, 1}),
              0.628 * s3 - 0.374 * (-3 * c3) + 2.015 * (-c5 / 3.0), 1e-12);
  // Reference terms that agree with the expansion.
  EXPECT_NEAR(p.Coefficient({2, 1}), 5.853, 1e-2);
  EXPECT_NEAR(p.Coefficient({1, 0}), 0.708, 1e-2);
  EXPECT_NEAR(p.Coefficient({0, 0}), 0.090, 1e-3);
  // The reference x2^3 and x2 terms (-2.137, -1.310) do not follow from the
  // reference system and noise; the expansion gives about -1.237 and -0.665.
  EXPECT_NEAR(p.Coefficient({0, 3}), -1.237, 1e-2);
  EXPECT_NEAR(p.Coefficient({0, 1}), -0.665, 1e-2);
}

TEST(PhiTest, LinearityAndParseval) {
  const OrthonormalSystem sys = GenerateSystem({3, 3, 12, 5});
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    CoefficientVector a(12), b(12), sum(12);
    double norm_sq = 0.0;
    for (int k = 0; k < 12; ++k) {
      a[k] = normal(gen);
      b[k] = normal(gen);
      sum[k] = a[k] + b[k];
      norm_sq += a[k] * a[k];
    }
    const Polynomial lhs = Phi(sum, sys);
    const Polynomial rhs = Phi(a, sys) + Phi(b, sys);
    for (const auto& [alpha, coef] : lhs.terms()) {
      EXPECT_NEAR(coef, rhs.Coefficient(alpha), 1e-12);
    }
    EXPECT_NEAR(L2Norm(Phi(a, sys)), std::sqrt(norm_sq), 1e-9);
  }
}

TEST(PhiInverseTest, RoundTripAndUnitVectors) {
  const OrthonormalSystem sys = ExampleSystem();
  const CoefficientVector e2 = PhiInverse(sys.element(1), sys);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(e2[k], k == 1 ? 1.0 : 0.0, 1e-12);

  const Polynomial mix = 0.5 * sys.element(0) + 2.0 * sys.element(2);
  const CoefficientVector got = PhiInverse(mix, sys);
  const double want[] = {0.5, 0.0, 2.0, 0.0, 0.0};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);

  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    CoefficientVector c(5);
    for (double& v : c) v = normal(gen);
    const CoefficientVector back = PhiInverse(Phi(c, sys), sys);
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(back[k], c[k], 1e-10);
  }
}

TEST(PhiInverseTest, RejectsPolynomialOutsideSpan) {
  const OrthonormalSystem sys = ExampleSystem();
  EXPECT_THROW(PhiInverse(Polynomial::Monomial({2, 0}), sys), InvalidArgument);
  EXPECT_THROW(PhiInverse(Polynomial::Monomial({1}), sys), InvalidArgument);
}

TEST(PolybasisTest, JsonRoundTrip) {
  const OrthonormalSystem sys = GenerateSystem({2, 2, 5, 9});
  const nlohmann::json j = SystemToJson(sys);
  EXPECT_EQ(j.at("K"), 2);
  EXPECT_EQ(j.at("m"), 2);
  EXPECT_EQ(j.at("N"), 5);
  const OrthonormalSystem back = SystemFromJson(j);
  EXPECT_EQ(back.monomials(), sys.monomials());
  for (int k = 0; k < sys.size(); ++k) {
    EXPECT_EQ(back.element(k).terms(), sys.element(k).terms());
  }
  nlohmann::json bad = j;
  bad["N"] = 4;
  EXPECT_THROW(SystemFromJson(bad), ConfigError);
}

}  // namespace
}  // namespace efpsn
