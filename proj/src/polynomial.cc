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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "efpsn/errors.h"

namespace efpsn {
namespace {

void CheckArity(const Polynomial& p, const Polynomial& q) {
  if (p.num_vars() != q.num_vars()) {
    throw InvalidArgument("polynomial: variable count mismatch");
  }
}

double IntPow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

int TotalOrder(const Exponent& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

Polynomial Polynomial::Monomial(const Exponent& alpha, double coefficient) {
  Polynomial p(static_cast<int>(alpha.size()));
  p.AddTerm(alpha, coefficient);
  return p;
}

void Polynomial::AddTerm(const Exponent& alpha, double coefficient) {
  if (static_cast<int>(alpha.size()) != num_vars_) {
    throw InvalidArgument("polynomial: exponent arity mismatch");
  }
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::Coefficient(const Exponent& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [alpha, c] : terms_) d = std::max(d, TotalOrder(alpha));
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  CheckArity(*this, other);
  for (const auto& [alpha, c] : other.terms_) AddTerm(alpha, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  CheckArity(*this, other);
  for (const auto& [alpha, c] : other.terms_) AddTerm(alpha, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [alpha, c] : terms_) c *= scale;
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  CheckArity(*this, other);
  Polynomial out(num_vars_);
  Exponent sum(num_vars_);
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : other.terms_) {
      for (int j = 0; j < num_vars_; ++j) sum[j] = a[j] + b[j];
      out.AddTerm(sum, ca * cb);
    }
  }
  return out;
}

double Polynomial::Evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != num_vars_) {
    throw InvalidArgument("polynomial: point dimension mismatch");
  }
  double value = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double term = c;
    for (int j = 0; j < num_vars_; ++j) term *= IntPow(x(j), alpha[j]);
    value += term;
  }
  return value;
}

Polynomial Polynomial::Derivative(int var) const {
  if (var < 0 || var >= num_vars_) {
    throw InvalidArgument("polynomial: derivative variable out of range");
  }
  Polynomial out(num_vars_);
  for (const auto& [alpha, c] : terms_) {
    if (alpha[var] == 0) continue;
    Exponent lowered = alpha;
    lowered[var] -= 1;
    out.AddTerm(lowered, c * alpha[var]);
  }
  return out;
}

Eigen::VectorXd Polynomial::Gradient(const Eigen::VectorXd& x) const {
  if (x.size() != num_vars_) {
    throw InvalidArgument("polynomial: point dimension mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [alpha, c] : terms_) {
    for (int var = 0; var < num_vars_; ++var) {
      if (alpha[var] == 0) continue;
      double term = c * alpha[var];
      for (int j = 0; j < num_vars_; ++j) {
        term *= IntPow(x(j), j == var ? alpha[j] - 1 : alpha[j]);
      }
      g(var) += term;
    }
  }
  return g;
}

std::string MonomialToString(const Exponent& alpha) {
  std::string out;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] == 0) continue;
    out += "x" + std::to_string(j + 1);
    if (alpha[j] > 1) out += "^" + std::to_string(alpha[j]);
  }
  return out.empty() ? "1" : out;
}

std::string Polynomial::ToString(int precision) const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Exponent, double>> sorted(terms_.begin(), terms_.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    const int oa = TotalOrder(a.first), ob = TotalOrder(b.first);
    if (oa != ob) return oa > ob;
    return a.first > b.first;
  });
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& [alpha, c] = sorted[i];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, std::abs(c));
    if (i == 0) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    out += buf;
    if (TotalOrder(alpha) > 0) out += MonomialToString(alpha);
  }
  return out;
}

mpq_class MonomialIntegral(const Exponent& alpha) {
  mpq_class out(1);
  for (int a : alpha) {
    if (a < 0) throw InvalidArgument("polynomial: negative exponent");
    if (a % 2 != 0) return mpq_class(0);
    out *= mpq_class(2, a + 1);
  }
  out.canonicalize();
  return out;
}

double InnerProduct(const Polynomial& p, const Polynomial& q) {
  CheckArity(p, q);
  const int m = p.num_vars();
  double out = 0.0;
  Exponent sum(m);
  for (const auto& [a, ca] : p.terms()) {
    for (const auto& [b, cb] : q.terms()) {
      bool odd = false;
      double integral = 1.0;
      for (int j = 0; j < m; ++j) {
        sum[j] = a[j] + b[j];
        if (sum[j] % 2 != 0) {
          odd = true;
          break;
        }
        integral *= 2.0 / (sum[j] + 1);
      }
      if (!odd) out += ca * cb * integral;
    }
  }
  return out;
}

double L2Norm(const Polynomial& p) {
  return std::sqrt(std::max(0.0, InnerProduct(p, p)));
}

Exponent ParseMonomial(std::string_view text, int num_vars) {
  Exponent alpha(num_vars, 0);
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw ConfigError("polynomial: empty monomial");
  if (s == "1") return alpha;
  std::size_t pos = 0;
  auto read_int = [&](const char* what) {
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) {
      throw ConfigError(std::string("polynomial: expected ") + what + " in '" +
                        std::string(text) + "'");
    }
    return std::stoi(s.substr(start, pos - start));
  };
  while (pos < s.size()) {
    if (s[pos] == '*') {
      ++pos;
      continue;
    }
    if (s[pos] != 'x') {
      throw ConfigError("polynomial: bad monomial '" + std::string(text) + "'");
    }
    ++pos;
    const int var = read_int("variable index");
    if (var < 1 || var > num_vars) {
      throw ConfigError("polynomial: variable x" + std::to_string(var) +
                        " out of range");
    }
    int power = 1;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      power = read_int("power");
    }
    alpha[var - 1] += power;
  }
  return alpha;
}

std::vector<Exponent> ParseMonomialList(std::string_view text, int num_vars) {
  std::vector<Exponent> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(ParseMonomial(text.substr(start, end - start), num_vars));
    start = end + 1;
  }
  return out;
}

}  // namespace efpsn
