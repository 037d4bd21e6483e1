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

#include "efpsn/paillier.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

constexpr std::array<unsigned, 25> kSmallPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

uint64_t Fingerprint(const BigInt& f) {
  // FNV-1a over the hexadecimal digits.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : f.get_str(16)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

BigInt PowMod(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
           mod.get_mpz_t());
  return out;
}

BigInt Gcd(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

BigInt Lcm(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

// L(u) = (u - 1) / f.
BigInt LFunction(const BigInt& u, const BigInt& f) {
  BigInt out = u - 1;
  mpz_fdiv_q(out.get_mpz_t(), out.get_mpz_t(), f.get_mpz_t());
  return out;
}

// Returns false if mu does not exist.
bool ComputeMu(const PublicKey& pub, const BigInt& lambda, BigInt& mu) {
  BigInt l = LFunction(PowMod(pub.g, lambda, pub.f_squared), pub.f);
  return mpz_invert(mu.get_mpz_t(), l.get_mpz_t(), pub.f.get_mpz_t()) != 0;
}

void Reseed(gmp_randclass& rng, uint64_t seed) {
  rng.seed(BigInt(static_cast<unsigned long>(seed)));
}

BigInt Pow10(int precision) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(precision));
  return out;
}

Keypair Assemble(const BigInt& a, const BigInt& b, const BigInt* g) {
  if (a == b) throw InvalidArgument("paillier: primes must differ");
  const BigInt f = a * b;
  if (Gcd(f, (a - 1) * (b - 1)) != 1) {
    throw InvalidArgument("paillier: gcd(ab, (a-1)(b-1)) != 1");
  }
  Keypair kp;
  kp.pub = MakePublicKey(f, g != nullptr ? *g : BigInt(f + 1));
  kp.lambda = Lcm(a - 1, b - 1);
  kp.bit_length = static_cast<unsigned>(
      std::max(mpz_sizeinbase(a.get_mpz_t(), 2), mpz_sizeinbase(b.get_mpz_t(), 2)));
  if (!ComputeMu(kp.pub, kp.lambda, kp.mu)) {
    throw InvalidArgument("paillier: mu does not exist for this generator");
  }
  return kp;
}

}  // namespace

bool IsProbablePrime(const BigInt& n, int rounds, gmp_randclass& rng) {
  if (n < 2) return false;
  for (unsigned p : kSmallPrimes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) return false;
  }
  BigInt d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  const BigInt n_minus_1 = n - 1;
  const BigInt witness_span = n - 3;  // witnesses in [2, n-2]
  for (int round = 0; round < rounds; ++round) {
    BigInt a = rng.get_z_range(witness_span) + 2;
    BigInt x = PowMod(a, d, n);
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (unsigned long i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

BigInt RandomPrime(unsigned bits, gmp_randclass& rng) {
  if (bits < 2) throw InvalidArgument("paillier: prime needs at least 2 bits");
  const unsigned budget = 200 * bits;
  for (unsigned attempt = 0; attempt < budget; ++attempt) {
    BigInt candidate = rng.get_z_bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (IsProbablePrime(candidate, kMillerRabinRounds, rng)) return candidate;
  }
  throw KeyGenerationFailure("paillier: no prime found within retry budget");
}

PublicKey MakePublicKey(const BigInt& f, const BigInt& g) {
  PublicKey pk;
  pk.f = f;
  pk.g = g;
  pk.f_squared = f * f;
  pk.tag = Fingerprint(f);
  return pk;
}

Keypair GenerateKeypair(unsigned bit_length, uint64_t seed,
                        GeneratorMode mode) {
  if (bit_length < kMinTestPrimeBits) {
    throw InvalidArgument("paillier: bit_length must be >= 16");
  }
  gmp_randclass rng(gmp_randinit_mt);
  Reseed(rng, DeriveSeed(seed, {stream::kKeygen}));
  constexpr int kPairAttempts = 64;
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    const BigInt a = RandomPrime(bit_length, rng);
    const BigInt b = RandomPrime(bit_length, rng);
    if (a == b) continue;
    const BigInt f = a * b;
    if (Gcd(f, (a - 1) * (b - 1)) != 1) continue;
    if (mode == GeneratorMode::kSimple) return Assemble(a, b, nullptr);

    const BigInt f_squared = f * f;
    const BigInt lambda = Lcm(a - 1, b - 1);
    for (int g_attempt = 0; g_attempt < 256; ++g_attempt) {
      BigInt g = rng.get_z_range(f_squared);
      if (g == 0 || Gcd(g, f) != 1) continue;
      BigInt mu;
      if (ComputeMu(MakePublicKey(f, g), lambda, mu)) return Assemble(a, b, &g);
    }
  }
  throw KeyGenerationFailure("paillier: no valid keypair within retry budget");
}

Keypair KeypairFromPrimes(const BigInt& a, const BigInt& b) {
  gmp_randclass rng(gmp_randinit_mt);
  Reseed(rng, 0);
  if (!IsProbablePrime(a, kMillerRabinRounds, rng) ||
      !IsProbablePrime(b, kMillerRabinRounds, rng)) {
    throw InvalidArgument("paillier: factors must be prime");
  }
  return Assemble(a, b, nullptr);
}

Keypair KeypairFromPrimes(const BigInt& a, const BigInt& b, const BigInt& g) {
  gmp_randclass rng(gmp_randinit_mt);
  Reseed(rng, 0);
  if (!IsProbablePrime(a, kMillerRabinRounds, rng) ||
      !IsProbablePrime(b, kMillerRabinRounds, rng)) {
    throw InvalidArgument("paillier: factors must be prime");
  }
  const BigInt f = a * b;
  if (g <= 0 || g >= f * f || Gcd(g, f) != 1) {
    throw InvalidArgument("paillier: g must lie in Z*_{f^2}");
  }
  return Assemble(a, b, &g);
}

bool VerifyKeypair(const Keypair& kp) {
  const BigInt l =
      LFunction(PowMod(kp.pub.g, kp.lambda, kp.pub.f_squared), kp.pub.f);
  BigInt check = kp.mu * l;
  mpz_mod(check.get_mpz_t(), check.get_mpz_t(), kp.pub.f.get_mpz_t());
  return check == 1;
}

BigInt SampleNonce(const PublicKey& pk, gmp_randclass& rng) {
  for (;;) {
    BigInt r = rng.get_z_range(pk.f);
    if (r != 0 && Gcd(r, pk.f) == 1) return r;
  }
}

Ciphertext Encrypt(const SignedResidue& p, const PublicKey& pk,
                   const BigInt& r) {
  if (p.residue < 0 || p.residue >= pk.f) {
    throw InvalidArgument("paillier: plaintext outside Z_f");
  }
  if (r <= 0 || r >= pk.f || Gcd(r, pk.f) != 1) {
    throw InvalidArgument("paillier: nonce must lie in Z*_f");
  }
  BigInt gp;
  if (pk.g == pk.f + 1) {
    // (1 + f)^p = 1 + p f (mod f^2)
    gp = (1 + p.residue * pk.f) % pk.f_squared;
  } else {
    gp = PowMod(pk.g, p.residue, pk.f_squared);
  }
  Ciphertext c;
  c.value = gp * PowMod(r, pk.f, pk.f_squared) % pk.f_squared;
  c.modulus_tag = pk.tag;
  return c;
}

SignedResidue Decrypt(const Ciphertext& c, const Keypair& kp) {
  if (c.modulus_tag != kp.pub.tag) {
    throw KeyMismatch("paillier: ciphertext was produced under another key");
  }
  if (c.value < 0 || c.value >= kp.pub.f_squared) {
    throw InvalidArgument("paillier: ciphertext outside Z_{f^2}");
  }
  BigInt p =
      LFunction(PowMod(c.value, kp.lambda, kp.pub.f_squared), kp.pub.f) * kp.mu;
  mpz_mod(p.get_mpz_t(), p.get_mpz_t(), kp.pub.f.get_mpz_t());
  return SignedResidue{p};
}

Ciphertext HomomorphicAdd(std::span<const Ciphertext> cs, const PublicKey& pk) {
  if (cs.empty()) throw InvalidArgument("paillier: nothing to add");
  Ciphertext out;
  out.value = 1;
  out.modulus_tag = pk.tag;
  for (const Ciphertext& c : cs) {
    if (c.modulus_tag != pk.tag) {
      throw KeyMismatch("paillier: mixed-key homomorphic addition");
    }
    out.value = out.value * c.value % pk.f_squared;
  }
  return out;
}

SignedResidue EncodeSigned(const BigInt& v, const BigInt& f) {
  if (2 * abs(v) >= f) {
    throw PlaintextOverflow("paillier: |v| >= f/2, increase key size or lower "
                            "the precision order");
  }
  BigInt r = v;
  if (r < 0) r += f;
  return SignedResidue{r};
}

BigInt DecodeSigned(const SignedResidue& s, const BigInt& f) {
  if (2 * s.residue > f) return s.residue - f;
  return s.residue;
}

BigInt QuantizeFloor(double x, int precision) {
  if (!std::isfinite(x)) throw InvalidArgument("paillier: non-finite value");
  if (precision < 0) throw InvalidArgument("paillier: negative precision");
  mpq_class scaled(x);  // exact
  scaled *= Pow10(precision);
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  return out;
}

SignedResidue EncodeFixedPoint(double x, int precision, const BigInt& f) {
  return EncodeSigned(QuantizeFloor(x, precision), f);
}

double DecodeFixedPoint(const SignedResidue& s, int precision,
                        const BigInt& f) {
  const BigInt v = DecodeSigned(s, f);
  // Correctly rounded whenever both operands are exact doubles.
  if (precision <= 22 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 53) {
    return v.get_d() / std::pow(10.0, precision);
  }
  mpq_class q(v, Pow10(precision));
  q.canonicalize();
  return q.get_d();
}

nlohmann::json KeypairToJson(const Keypair& kp) {
  return {{"bit_length", kp.bit_length},
          {"f", kp.pub.f.get_str()},
          {"g", kp.pub.g.get_str()},
          {"lambda", kp.lambda.get_str()},
          {"mu", kp.mu.get_str()}};
}

nlohmann::json PublicKeyToJson(const PublicKey& pk) {
  return {{"f", pk.f.get_str()}, {"g", pk.g.get_str()}};
}

Keypair KeypairFromJson(const nlohmann::json& j) {
  Keypair kp;
  try {
    kp.pub = MakePublicKey(BigInt(j.at("f").get<std::string>()),
                           BigInt(j.at("g").get<std::string>()));
    kp.lambda = BigInt(j.at("lambda").get<std::string>());
    kp.mu = BigInt(j.at("mu").get<std::string>());
    kp.bit_length = j.at("bit_length").get<unsigned>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("paillier: malformed keypair json: ") +
                      e.what());
  }
  if (!VerifyKeypair(kp)) {
    throw ConfigError("paillier: keypair json fails mu * L(g^lambda) = 1");
  }
  return kp;
}

std::string CiphertextToString(const Ciphertext& c) { return c.value.get_str(); }

}  // namespace efpsn
