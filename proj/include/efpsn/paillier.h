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

// Paillier cryptosystem over GMP integers with a signed fixed-point
// plaintext encoding.
//
// Public key (f, g), private key (lambda, mu):
//   f = a*b for equal-length primes a != b with gcd(f, (a-1)(b-1)) = 1
//   lambda = lcm(a-1, b-1)
//   mu = L(g^lambda mod f^2)^-1 mod f,  L(u) = (u-1)/f
//   En(p, r) = g^p * r^f mod f^2
//   De(c) = L(c^lambda mod f^2) * mu mod f
//
// Signed integers v with |v| < f/2 are embedded in Z_f as v mod f; residues
// above f/2 decode as negative.

#ifndef EFPSN_PAILLIER_H_
#define EFPSN_PAILLIER_H_

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"

namespace efpsn {

using BigInt = mpz_class;

// How g is chosen at key generation.
enum class GeneratorMode {
  kSimple,  // g = f + 1
  kRandom,  // uniform g in Z*_{f^2} with mu defined
};

inline constexpr int kMillerRabinRounds = 40;
inline constexpr unsigned kMinTestPrimeBits = 16;
inline constexpr unsigned kMinSecurePrimeBits = 512;

struct PublicKey {
  BigInt f;
  BigInt g;
  BigInt f_squared;
  // Fingerprint of f; ciphertexts carry it so mixed-key use is detected.
  uint64_t tag = 0;
};

struct Keypair {
  PublicKey pub;
  BigInt lambda;
  BigInt mu;
  unsigned bit_length = 0;  // bits per prime factor

  const BigInt& f() const { return pub.f; }
};

struct Ciphertext {
  BigInt value;
  uint64_t modulus_tag = 0;
};

struct SignedResidue {
  BigInt residue;  // in [0, f)
};

// Miller-Rabin with `rounds` random witnesses drawn from `rng`.
bool IsProbablePrime(const BigInt& n, int rounds, gmp_randclass& rng);

// Random prime with exactly `bits` bits.
BigInt RandomPrime(unsigned bits, gmp_randclass& rng);

// Deterministic given (bit_length, seed). Requires bit_length >= 16; values
// below 512 are test-mode keys. Throws KeyGenerationFailure when the retry
// budget is exhausted.
Keypair GenerateKeypair(unsigned bit_length, uint64_t seed,
                        GeneratorMode mode = GeneratorMode::kSimple);

// Builds a keypair from explicit primes (any size). Uses g = f + 1 unless a
// generator is supplied. Throws InvalidArgument when the Keypair invariants
// cannot hold.
Keypair KeypairFromPrimes(const BigInt& a, const BigInt& b);
Keypair KeypairFromPrimes(const BigInt& a, const BigInt& b, const BigInt& g);

// Checks mu * L(g^lambda mod f^2) == 1 (mod f).
bool VerifyKeypair(const Keypair& kp);

PublicKey MakePublicKey(const BigInt& f, const BigInt& g);

// Uniform r in Z*_f.
BigInt SampleNonce(const PublicKey& pk, gmp_randclass& rng);

Ciphertext Encrypt(const SignedResidue& p, const PublicKey& pk,
                   const BigInt& r);
SignedResidue Decrypt(const Ciphertext& c, const Keypair& kp);

// Product of ciphertext values mod f^2; decrypts to the plaintext sum mod f.
Ciphertext HomomorphicAdd(std::span<const Ciphertext> cs, const PublicKey& pk);

// Signed-integer embedding into Z_f. Throws PlaintextOverflow unless
// 2|v| < f.
SignedResidue EncodeSigned(const BigInt& v, const BigInt& f);
BigInt DecodeSigned(const SignedResidue& s, const BigInt& f);

// floor(10^precision * x), computed exactly from the binary value of x.
BigInt QuantizeFloor(double x, int precision);

SignedResidue EncodeFixedPoint(double x, int precision, const BigInt& f);
double DecodeFixedPoint(const SignedResidue& s, int precision,
                        const BigInt& f);

// {"bit_length": n, "f": "...", "g": "...", "lambda": "...", "mu": "..."}
// with big integers as decimal strings.
nlohmann::json KeypairToJson(const Keypair& kp);
Keypair KeypairFromJson(const nlohmann::json& j);
nlohmann::json PublicKeyToJson(const PublicKey& pk);

std::string CiphertextToString(const Ciphertext& c);

}  // namespace efpsn

#endif  // EFPSN_PAILLIER_H_
