#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#include "skyline/bigint.hpp"

namespace sky {

struct KeyMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Paillier ciphertext: a value in (0, N^2) bound to its key by key_id.
struct Ciphertext {
  Bigint value;
  uint64_t key_id = 0;
};

struct PublicKey {
  unsigned key_bits = 0;  // configured size K of the modulus
  Bigint n;               // modulus, product of two primes
  Bigint n2;              // n^2, cached
  Bigint g;               // generator, fixed to n + 1
  uint64_t key_id = 0;

  // (n+1)/2 == 2^-1 mod n; used by the bit-decomposition shift.
  Bigint half;

  static PublicKey from_modulus(unsigned key_bits, const Bigint& n);
};

struct PrivateKey {
  unsigned key_bits = 0;
  Bigint p, q;
  Bigint lambda;  // lcm(p-1, q-1)
  Bigint mu;      // (L(g^lambda mod n^2))^-1 mod n
  uint64_t key_id = 0;

  // CRT caches for decryption and randomizer exponentiation.
  Bigint n, n2;
  Bigint p2, q2;
  Bigint hp, hq;        // per-prime decryption factors
  Bigint q_inv_p;       // q^-1 mod p
  Bigint q2_inv_p2;     // (q^2)^-1 mod p^2

  static PrivateKey from_primes(unsigned key_bits, const Bigint& p, const Bigint& q);
};

struct KeyPair {
  PublicKey pk;
  PrivateKey sk;
};

/// Count of the expensive cryptographic operations performed so far,
/// process-wide. Plaintext-space homomorphic ops are tallied separately.
struct PaillierOpCounts {
  uint64_t encryptions = 0;
  uint64_t decryptions = 0;
  uint64_t plain_ops = 0;  // constant embeddings and plaintext additions
};

PaillierOpCounts paillier_op_counts();
void reset_paillier_op_counts();

/// Generates a fresh keypair. key_size_bits must be one of 512, 1024, 2048.
KeyPair keygen(unsigned key_size_bits, Rng& rng);

/// Probabilistic encryption of m in [0, N).
Ciphertext encrypt(const PublicKey& pk, const Bigint& m, Rng& rng);

/// Encryption using the private key's CRT caches; same distribution as
/// encrypt(), cheaper. For the key-holder role.
Ciphertext encrypt_with_sk(const PrivateKey& sk, const Bigint& m, Rng& rng);

Bigint decrypt(const PrivateKey& sk, const Ciphertext& c);

/// Deterministic embedding (1 + mN mod N^2) of a public constant.
/// Carries no randomness: only for values that are public to the party
/// creating them, never as a message hiding anything.
Ciphertext constant_ciphertext(const PublicKey& pk, const Bigint& m);

/// Decrypts to (a + b) mod N.
Ciphertext add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);
/// Decrypts to (a + m) mod N, m known in plaintext to the caller.
Ciphertext add_plain(const PublicKey& pk, const Ciphertext& c, const Bigint& m);
/// Decrypts to (a * k) mod N, 0 <= k < N.
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const Bigint& k);
/// Decrypts to (N - a) mod N. Plaintext-equivalent to scalar_mul(c, N-1);
/// computed as the group inverse, which is much cheaper.
Ciphertext negate(const PublicKey& pk, const Ciphertext& c);
/// Decrypts to (a - b) mod N.
Ciphertext sub(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);
/// Fresh ciphertext value, same plaintext.
Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c, Rng& rng);

/// Cheap well-formedness probe: 0 < value < N^2 and gcd(value, N) == 1.
bool ciphertext_well_formed(const PublicKey& pk, const Ciphertext& c);

/// Protocol-wide size parameters shared by every subprotocol.
struct ProtocolParams {
  unsigned l = 20;       // bit-length of protocol values
  unsigned d = 8;        // bit-length of the raw attribute domain
  unsigned kappa = 80;   // statistical masking bits
  unsigned key_bits = 512;
  uint64_t n = 0;        // tuple count
  uint64_t m = 0;        // dimension count

  unsigned log2n() const { return ceil_log2(n == 0 ? 1 : n); }
  /// Width of a perturbed attribute sum: l + ceil(log2 n).
  unsigned sum_width() const { return l + log2n(); }
  /// Widest additive blind the subprotocols draw.
  unsigned blind_bits() const { return l + kappa; }

  /// Enforces: l >= 2d + ceil(log2 m), and
  /// 2^(l + ceil(log2 n) + kappa + 2) < N for the given key.
  void validate(const PublicKey& pk) const;
};

}  // namespace sky
