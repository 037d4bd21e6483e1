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
#include <map>
#include <set>
#include <string>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

using RationalPolynomial = std::map<Exponent, mpq_class>;

mpq_class ExactInner(const RationalPolynomial& p, const RationalPolynomial& q) {
  mpq_class out(0);
  Exponent sum;
  for (const auto& [a, ca] : p) {
    sum.resize(a.size());
    for (const auto& [b, cb] : q) {
      for (std::size_t j = 0; j < a.size(); ++j) sum[j] = a[j] + b[j];
      mpq_class integral = MonomialIntegral(sum);
      if (integral != 0) out += ca * cb * integral;
    }
  }
  return out;
}

void SubtractScaled(RationalPolynomial& v, const mpq_class& scale,
                    const RationalPolynomial& u) {
  for (const auto& [alpha, c] : u) {
    mpq_class& slot = v[alpha];
    slot -= scale * c;
    if (slot == 0) v.erase(alpha);
  }
}

// Incremental exact Gram-Schmidt state.
class ExactOrthogonalizer {
 public:
  explicit ExactOrthogonalizer(int num_vars) : num_vars_(num_vars) {}

  // Returns false (and leaves the state unchanged) when the candidate's
  // post-projection norm is below 1e-12.
  bool Add(const Exponent& alpha) {
    RationalPolynomial v;
    v[alpha] = 1;
    // Modified Gram-Schmidt: project the running remainder.
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      mpq_class coef = ExactInner(v, basis_[j]) / norms_sq_[j];
      if (coef != 0) SubtractScaled(v, coef, basis_[j]);
    }
    mpq_class norm_sq = ExactInner(v, v);
    if (v.empty() || std::sqrt(norm_sq.get_d()) < 1e-12) return false;
    basis_.push_back(std::move(v));
    norms_sq_.push_back(std::move(norm_sq));
    return true;
  }

  std::vector<Polynomial> Normalized() const {
    std::vector<Polynomial> out;
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const double inv_norm = 1.0 / std::sqrt(norms_sq_[k].get_d());
      Polynomial e(num_vars_);
      for (const auto& [alpha, c] : basis_[k]) e.AddTerm(alpha, c.get_d() * inv_norm);
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  int num_vars_;
  std::vector<RationalPolynomial> basis_;
  std::vector<mpq_class> norms_sq_;
};

void CheckParams(const BasisParams& params) {
  if (params.max_degree < 0 || params.num_vars < 1 || params.num_elements < 1) {
    throw InvalidArgument("polybasis: need K >= 0, m >= 1, N >= 1");
  }
}

Exponent ExponentFromJson(const nlohmann::json& j) {
  return j.get<std::vector<int>>();
}

}  // namespace

Eigen::MatrixXd OrthonormalSystem::GramMatrix() const {
  const int n = size();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      gram(i, j) = gram(j, i) = InnerProduct(elements_[i], elements_[j]);
  return gram;
}

std::vector<Exponent> EnumerateMonomials(int max_degree, int num_vars) {
  std::vector<Exponent> out;
  Exponent alpha(num_vars, 0);
  for (int order = 0; order <= max_degree; ++order) {
    // Compositions of `order` into num_vars parts, lexicographically
    // descending.
    std::vector<Exponent> level;
    auto recurse = [&](auto&& self, int var, int remaining) -> void {
      if (var == num_vars - 1) {
        alpha[var] = remaining;
        level.push_back(alpha);
        return;
      }
      for (int a = remaining; a >= 0; --a) {
        alpha[var] = a;
        self(self, var + 1, remaining - a);
      }
    };
    recurse(recurse, 0, order);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

OrthonormalSystem GenerateSystem(const BasisParams& params) {
  CheckParams(params);
  const std::vector<Exponent> pool =
      EnumerateMonomials(params.max_degree, params.num_vars);
  if (params.num_elements > static_cast<int>(pool.size())) {
    throw InvalidArgument("polybasis: N exceeds the number of monomials of "
                          "total order <= K (" + std::to_string(pool.size()) + ")");
  }
  Rng rng = MakeRng(params.seed, {stream::kBasis});
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::set<std::size_t> drawn;
  std::vector<Exponent> chosen;
  ExactOrthogonalizer gs(params.num_vars);
  while (static_cast<int>(chosen.size()) < params.num_elements) {
    const std::size_t index = pick(rng);
    if (!drawn.insert(index).second) continue;  // duplicate, resample
    if (!gs.Add(pool[index])) continue;
    chosen.push_back(pool[index]);
  }
  return OrthonormalSystem(params, std::move(chosen), gs.Normalized());
}

OrthonormalSystem GenerateSystemFromMonomials(
    const std::vector<Exponent>& monomials, int max_degree) {
  if (monomials.empty()) throw InvalidArgument("polybasis: empty monomial list");
  BasisParams params;
  params.max_degree = max_degree;
  params.num_vars = static_cast<int>(monomials.front().size());
  params.num_elements = static_cast<int>(monomials.size());
  CheckParams(params);
  std::set<Exponent> seen;
  ExactOrthogonalizer gs(params.num_vars);
  for (const Exponent& alpha : monomials) {
    if (static_cast<int>(alpha.size()) != params.num_vars) {
      throw InvalidArgument("polybasis: monomial arity mismatch");
    }
    if (TotalOrder(alpha) > max_degree) {
      throw InvalidArgument("polybasis: monomial " + MonomialToString(alpha) +
                            " exceeds K");
    }
    if (!seen.insert(alpha).second) {
      throw InvalidArgument("polybasis: duplicate monomial " +
                            MonomialToString(alpha));
    }
    if (!gs.Add(alpha)) {
      throw InvalidArgument("polybasis: dependent monomial " +
                            MonomialToString(alpha));
    }
  }
  return OrthonormalSystem(params, monomials, gs.Normalized());
}

Polynomial Phi(const CoefficientVector& c, const OrthonormalSystem& system) {
  if (static_cast<int>(c.size()) != system.size()) {
    throw InvalidArgument("polybasis: coefficient length " +
                          std::to_string(c.size()) + " != system size " +
                          std::to_string(system.size()));
  }
  Polynomial out(system.num_vars());
  for (int k = 0; k < system.size(); ++k) {
    if (c[k] != 0.0) out += c[k] * system.element(k);
  }
  return out;
}

CoefficientVector PhiInverse(const Polynomial& p,
                             const OrthonormalSystem& system,
                             double residual_tolerance) {
  if (p.num_vars() != system.num_vars()) {
    throw InvalidArgument("polybasis: polynomial arity mismatch");
  }
  CoefficientVector c(system.size());
  for (int k = 0; k < system.size(); ++k) c[k] = InnerProduct(p, system.element(k));
  const double residual = L2Norm(p - Phi(c, system));
  if (residual > residual_tolerance) {
    throw InvalidArgument("polybasis: polynomial lies outside the span "
                          "(residual " + std::to_string(residual) + ")");
  }
  return c;
}

nlohmann::json SystemToJson(const OrthonormalSystem& system) {
  nlohmann::json elements = nlohmann::json::array();
  for (const Polynomial& e : system.elements()) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [alpha, c] : e.terms()) {
      terms.push_back({{"exponents", alpha}, {"coefficient", c}});
    }
    elements.push_back(std::move(terms));
  }
  return {{"K", system.params().max_degree},
          {"m", system.params().num_vars},
          {"N", system.params().num_elements},
          {"seed", system.params().seed},
          {"monomials", system.monomials()},
          {"elements", std::move(elements)}};
}

OrthonormalSystem SystemFromJson(const nlohmann::json& j) {
  try {
    BasisParams params;
    params.max_degree = j.at("K").get<int>();
    params.num_vars = j.at("m").get<int>();
    params.num_elements = j.at("N").get<int>();
    params.seed = j.at("seed").get<uint64_t>();
    std::vector<Exponent> monomials;
    for (const auto& m : j.at("monomials")) monomials.push_back(ExponentFromJson(m));
    std::vector<Polynomial> elements;
    for (const auto& terms : j.at("elements")) {
      Polynomial e(params.num_vars);
      for (const auto& t : terms) {
        e.AddTerm(ExponentFromJson(t.at("exponents")),
                  t.at("coefficient").get<double>());
      }
      elements.push_back(std::move(e));
    }
    if (static_cast<int>(elements.size()) != params.num_elements) {
      throw ConfigError("element count does not match N");
    }
    return OrthonormalSystem(params, std::move(monomials), std::move(elements));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("polybasis: malformed system json: ") + e.what());
  }
}

}  // namespace efpsn
