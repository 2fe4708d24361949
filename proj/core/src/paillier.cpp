#include "skyline/paillier.hpp"

namespace sky {

namespace {

std::atomic<uint64_t> g_encryptions{0};
std::atomic<uint64_t> g_decryptions{0};
std::atomic<uint64_t> g_plain_ops{0};

uint64_t fnv1a(std::span<const uint8_t> bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void require_same_key(const PublicKey& pk, const Ciphertext& c) {
  if (c.key_id != pk.key_id) throw KeyMismatchError("ciphertext bound to a different key");
}

// L(u) = (u - 1) / x for u = 1 mod x.
Bigint cancel(const Bigint& u, const Bigint& x) { return (u - Bigint(1)) / x; }

Bigint random_prime(unsigned bits, Rng& rng) {
  for (;;) {
    Bigint cand = rng.bits(bits);
    // top two bits set so the product of two such primes has exactly 2*bits bits
    mpz_setbit(cand.raw(), bits - 1);
    mpz_setbit(cand.raw(), bits - 2);
    mpz_setbit(cand.raw(), 0);
    // 40 Miller-Rabin rounds: error probability below 2^-80
    for (int step = 0; step < 4096; ++step) {
      if (mpz_probab_prime_p(cand.raw(), 40) != 0) return cand;
      mpz_add_ui(cand.raw(), cand.raw(), 2);
      if (cand.bit_length() > bits) break;  // walked out of range, resample
    }
  }
}

}  // namespace

PaillierOpCounts paillier_op_counts() {
  return {g_encryptions.load(), g_decryptions.load(), g_plain_ops.load()};
}

void reset_paillier_op_counts() {
  g_encryptions = 0;
  g_decryptions = 0;
  g_plain_ops = 0;
}

PublicKey PublicKey::from_modulus(unsigned key_bits, const Bigint& n) {
  PublicKey pk;
  pk.key_bits = key_bits;
  pk.n = n;
  pk.n2 = n * n;
  pk.g = n + Bigint(1);
  pk.key_id = fnv1a(n.to_bytes());
  pk.half = (n + Bigint(1)) / Bigint(2);
  return pk;
}

PrivateKey PrivateKey::from_primes(unsigned key_bits, const Bigint& p, const Bigint& q) {
  PrivateKey sk;
  sk.key_bits = key_bits;
  sk.p = p;
  sk.q = q;
  sk.n = p * q;
  sk.n2 = sk.n * sk.n;
  sk.p2 = p * p;
  sk.q2 = q * q;
  sk.lambda = lcm(p - Bigint(1), q - Bigint(1));
  Bigint g = sk.n + Bigint(1);
  sk.mu = invm(cancel(powm(g, sk.lambda, sk.n2), sk.n) % sk.n, sk.n);
  // hp = (L_p(g^(p-1) mod p^2))^-1 mod p, likewise hq
  sk.hp = invm(cancel(powm(g % sk.p2, p - Bigint(1), sk.p2), p) % p, p);
  sk.hq = invm(cancel(powm(g % sk.q2, q - Bigint(1), sk.q2), q) % q, q);
  sk.q_inv_p = invm(q % p, p);
  sk.q2_inv_p2 = invm(sk.q2 % sk.p2, sk.p2);
  sk.key_id = fnv1a(sk.n.to_bytes());
  return sk;
}

KeyPair keygen(unsigned key_size_bits, Rng& rng) {
  if (key_size_bits != 512 && key_size_bits != 1024 && key_size_bits != 2048)
    throw DomainError("key size must be 512, 1024 or 2048 bits");
  for (;;) {
    Bigint p = random_prime(key_size_bits / 2, rng);
    Bigint q = random_prime(key_size_bits / 2, rng);
    if (p == q) continue;
    Bigint n = p * q;
    if (n.bit_length() != key_size_bits) continue;
    if (gcd(n, lcm(p - Bigint(1), q - Bigint(1))) != Bigint(1)) continue;
    KeyPair kp;
    kp.pk = PublicKey::from_modulus(key_size_bits, n);
    kp.sk = PrivateKey::from_primes(key_size_bits, p, q);
    return kp;
  }
}

Ciphertext encrypt(const PublicKey& pk, const Bigint& m, Rng& rng) {
  if (m < Bigint(0) || m >= pk.n) throw DomainError("plaintext outside [0, N)");
  Bigint rho = rng.nonzero_below(pk.n);
  // (1 + mN) * rho^N mod N^2
  Bigint c = mulm(Bigint(1) + m * pk.n, powm(rho, pk.n, pk.n2), pk.n2);
  g_encryptions.fetch_add(1, std::memory_order_relaxed);
  return {std::move(c), pk.key_id};
}

Ciphertext encrypt_with_sk(const PrivateKey& sk, const Bigint& m, Rng& rng) {
  if (m < Bigint(0) || m >= sk.n) throw DomainError("plaintext outside [0, N)");
  // The randomizer of a fresh ciphertext is a uniform N-th residue. Mod
  // p^2 those form the order-(p-1) subgroup {y^p}, so sampling y_p^p and
  // y_q^q per prime and CRT-combining draws from the same distribution
  // as rho^N for uniform rho, at half the exponent width.
  Bigint rp = powm(rng.nonzero_below(sk.p2), sk.p, sk.p2);
  Bigint rq = powm(rng.nonzero_below(sk.q2), sk.q, sk.q2);
  Bigint u = mulm(rp + sk.p2 - (rq % sk.p2), sk.q2_inv_p2, sk.p2);
  Bigint rn = (rq + sk.q2 * u) % sk.n2;
  Bigint c = mulm(Bigint(1) + m * sk.n, rn, sk.n2);
  g_encryptions.fetch_add(1, std::memory_order_relaxed);
  return {std::move(c), sk.key_id};
}

Bigint decrypt(const PrivateKey& sk, const Ciphertext& c) {
  if (c.key_id != sk.key_id) throw KeyMismatchError("ciphertext bound to a different key");
  if (c.value <= Bigint(0) || c.value >= sk.n2) throw DomainError("ciphertext outside (0, N^2)");
  Bigint mp = mulm(cancel(powm(c.value % sk.p2, sk.p - Bigint(1), sk.p2), sk.p) % sk.p, sk.hp, sk.p);
  Bigint mq = mulm(cancel(powm(c.value % sk.q2, sk.q - Bigint(1), sk.q2), sk.q) % sk.q, sk.hq, sk.q);
  // Garner: m = mq + q * ((mp - mq) * q^-1 mod p)
  Bigint diff = mulm(mp + sk.p - (mq % sk.p), sk.q_inv_p, sk.p);
  g_decryptions.fetch_add(1, std::memory_order_relaxed);
  return (mq + sk.q * diff) % sk.n;
}

Ciphertext constant_ciphertext(const PublicKey& pk, const Bigint& m) {
  if (m < Bigint(0) || m >= pk.n) throw DomainError("plaintext outside [0, N)");
  g_plain_ops.fetch_add(1, std::memory_order_relaxed);
  return {(Bigint(1) + m * pk.n) % pk.n2, pk.key_id};
}

Ciphertext add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
  require_same_key(pk, c1);
  require_same_key(pk, c2);
  return {mulm(c1.value, c2.value, pk.n2), pk.key_id};
}

Ciphertext add_plain(const PublicKey& pk, const Ciphertext& c, const Bigint& m) {
  require_same_key(pk, c);
  g_plain_ops.fetch_add(1, std::memory_order_relaxed);
  return {mulm(c.value, Bigint(1) + (m % pk.n) * pk.n, pk.n2), pk.key_id};
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const Bigint& k) {
  require_same_key(pk, c);
  if (k < Bigint(0) || k >= pk.n) throw DomainError("scalar outside [0, N)");
  return {powm(c.value, k, pk.n2), pk.key_id};
}

Ciphertext negate(const PublicKey& pk, const Ciphertext& c) {
  require_same_key(pk, c);
  return {invm(c.value, pk.n2), pk.key_id};
}

Ciphertext sub(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
  require_same_key(pk, c1);
  require_same_key(pk, c2);
  return {mulm(c1.value, invm(c2.value, pk.n2), pk.n2), pk.key_id};
}

Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c, Rng& rng) {
  require_same_key(pk, c);
  Bigint rho = rng.nonzero_below(pk.n);
  g_encryptions.fetch_add(1, std::memory_order_relaxed);
  return {mulm(c.value, powm(rho, pk.n, pk.n2), pk.n2), pk.key_id};
}

bool ciphertext_well_formed(const PublicKey& pk, const Ciphertext& c) {
  if (c.key_id != pk.key_id) return false;
  if (c.value <= Bigint(0) || c.value >= pk.n2) return false;
  return gcd(c.value, pk.n) == Bigint(1);
}

void ProtocolParams::validate(const PublicKey& pk) const {
  if (m > 0 && l < 2 * d + ceil_log2(m))
    throw DomainError("l too small: need l >= 2d + ceil(log2 m)");
  unsigned needed = l + log2n() + kappa + 2;
  if (pow2(needed) >= pk.n)
    throw DomainError("key too small: need 2^(l + log2n + kappa + 2) < N");
}

}  // namespace sky
