#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "skyline/paillier.hpp"
#include "skyline/storage.hpp"

using namespace sky;

namespace {

KeyPair& test_keys() {
  static KeyPair kp = [] {
    Rng rng(0x5eed);
    return keygen(512, rng);
  }();
  return kp;
}

}  // namespace

TEST_CASE("keygen produces moduli of the configured size") {
  Rng rng(1);
  KeyPair kp = keygen(512, rng);
  CHECK(kp.pk.n.bit_length() == 512);
  CHECK(kp.pk.n.is_odd());
  CHECK(kp.pk.n2 == kp.pk.n * kp.pk.n);
  CHECK(kp.pk.g == kp.pk.n + Bigint(1));
  CHECK(kp.sk.p * kp.sk.q == kp.pk.n);

  KeyPair other = keygen(512, rng);
  CHECK(other.pk.n != kp.pk.n);
}

TEST_CASE("keygen rejects undersized keys") {
  Rng rng(2);
  CHECK_THROWS_AS(keygen(256, rng), DomainError);
  CHECK_THROWS_AS(keygen(100, rng), DomainError);
}

TEST_CASE("decrypt inverts encrypt across the plaintext domain") {
  auto& kp = test_keys();
  Rng rng(3);
  for (const Bigint& m : {Bigint(0), Bigint(1), Bigint(42), kp.pk.n - Bigint(1)})
    CHECK(decrypt(kp.sk, encrypt(kp.pk, m, rng)) == m);
  for (int i = 0; i < 16; ++i) {
    Bigint m = rng.below(kp.pk.n);
    CHECK(decrypt(kp.sk, encrypt(kp.pk, m, rng)) == m);
  }
  CHECK_THROWS_AS(encrypt(kp.pk, kp.pk.n, rng), DomainError);
}

TEST_CASE("key-holder encryption matches the public path") {
  auto& kp = test_keys();
  Rng rng(31);
  for (int i = 0; i < 8; ++i) {
    Bigint m = rng.below(kp.pk.n);
    Ciphertext c = encrypt_with_sk(kp.sk, m, rng);
    CHECK(decrypt(kp.sk, c) == m);
    CHECK(ciphertext_well_formed(kp.pk, c));
  }
}

TEST_CASE("homomorphic identities hold exhaustively on a small domain") {
  auto& kp = test_keys();
  Rng rng(4);
  std::vector<Ciphertext> enc;
  for (unsigned v = 0; v < 64; ++v) enc.push_back(encrypt(kp.pk, v, rng));
  for (unsigned a = 0; a < 64; ++a)
    for (unsigned b = 0; b < 64; ++b) {
      CHECK(decrypt(kp.sk, add(kp.pk, enc[a], enc[b])) == Bigint(a + b));
      CHECK(decrypt(kp.sk, scalar_mul(kp.pk, enc[a], b)) == Bigint(a * b));
    }
}

TEST_CASE("subtraction and negation work as modular values") {
  auto& kp = test_keys();
  Rng rng(5);
  Ciphertext c9 = encrypt(kp.pk, 9, rng), c4 = encrypt(kp.pk, 4, rng);
  CHECK(decrypt(kp.sk, sub(kp.pk, c9, c4)) == Bigint(5));
  CHECK(decrypt(kp.sk, sub(kp.pk, c4, c9)) == kp.pk.n - Bigint(5));
  CHECK(decrypt(kp.sk, sub(kp.pk, c9, c9)) == Bigint(0));
  // negate is plaintext-equivalent to the exponent-(N-1) form
  Ciphertext c7 = encrypt(kp.pk, 7, rng);
  CHECK(decrypt(kp.sk, negate(kp.pk, c7)) ==
        decrypt(kp.sk, scalar_mul(kp.pk, c7, kp.pk.n - Bigint(1))));
  CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c7, 1)) == Bigint(7));
  CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c7, kp.pk.n - Bigint(1))) == kp.pk.n - Bigint(7));
}

TEST_CASE("encryption is probabilistic: no collisions in 1000 encryptions") {
  auto& kp = test_keys();
  Rng rng(6);
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) CHECK(seen.insert(encrypt(kp.pk, 5, rng).value.hex()).second);
}

TEST_CASE("rerandomize changes the ciphertext, never the plaintext") {
  auto& kp = test_keys();
  Rng rng(7);
  Ciphertext c = encrypt(kp.pk, 5, rng);
  Ciphertext r1 = rerandomize(kp.pk, c, rng);
  Ciphertext r2 = rerandomize(kp.pk, c, rng);
  CHECK(r1.value != c.value);
  CHECK(r2.value != r1.value);
  Ciphertext cur = c;
  for (int i = 0; i < 100; ++i) cur = rerandomize(kp.pk, cur, rng);
  CHECK(decrypt(kp.sk, cur) == Bigint(5));
}

TEST_CASE("plaintext-space helpers") {
  auto& kp = test_keys();
  Rng rng(8);
  Ciphertext c = encrypt(kp.pk, 30, rng);
  CHECK(decrypt(kp.sk, add_plain(kp.pk, c, 12)) == Bigint(42));
  CHECK(decrypt(kp.sk, constant_ciphertext(kp.pk, 99)) == Bigint(99));
}

TEST_CASE("operations reject foreign keys") {
  auto& kp = test_keys();
  Rng rng(9);
  KeyPair other = keygen(512, rng);
  Ciphertext c = encrypt(kp.pk, 1, rng);
  Ciphertext f = encrypt(other.pk, 1, rng);
  CHECK_THROWS_AS(add(kp.pk, c, f), KeyMismatchError);
  CHECK_THROWS_AS(decrypt(other.sk, c), KeyMismatchError);
}

TEST_CASE("protocol parameter invariants") {
  auto& kp = test_keys();
  ProtocolParams p;
  p.n = 1000;
  p.m = 2;
  CHECK_NOTHROW(p.validate(kp.pk));  // defaults: l=20, d=8, kappa=80

  ProtocolParams narrow = p;
  narrow.l = 10;  // < 2d + ceil(log2 m)
  CHECK_THROWS_AS(narrow.validate(kp.pk), DomainError);

  ProtocolParams wide = p;
  wide.l = 300;
  wide.d = 100;
  wide.kappa = 256;  // 2^(l + log2n + kappa + 2) >= N
  CHECK_THROWS_AS(wide.validate(kp.pk), DomainError);

  CHECK(p.log2n() == 10);
  CHECK(p.sum_width() == 30);
}

TEST_CASE("key files round-trip, with hex siblings for debugging") {
  auto& kp = test_keys();
  auto dir = std::filesystem::temp_directory_path() / "sky_keys_test";
  std::filesystem::create_directories(dir);
  std::string pub = (dir / "pub.key").string();
  std::string priv = (dir / "priv.key").string();
  save_public_key(pub, kp.pk);
  save_private_key(priv, kp.sk);

  PublicKey pk2 = load_public_key(pub);
  PrivateKey sk2 = load_private_key(priv);
  CHECK(pk2.n == kp.pk.n);
  CHECK(pk2.key_bits == kp.pk.key_bits);
  CHECK(pk2.key_id == kp.pk.key_id);
  CHECK(sk2.p == kp.sk.p);
  CHECK(sk2.q == kp.sk.q);
  CHECK(sk2.lambda == kp.sk.lambda);
  CHECK(sk2.mu == kp.sk.mu);
  Rng rng(10);
  CHECK(decrypt(sk2, encrypt(pk2, 77, rng)) == Bigint(77));
  CHECK(std::filesystem::exists(pub + ".hex"));
  CHECK(std::filesystem::exists(priv + ".hex"));
}

TEST_CASE("op counters track encryptions and decryptions") {
  auto& kp = test_keys();
  Rng rng(11);
  reset_paillier_op_counts();
  Ciphertext c = encrypt(kp.pk, 1, rng);
  decrypt(kp.sk, c);
  decrypt(kp.sk, c);
  auto counts = paillier_op_counts();
  CHECK(counts.encryptions == 1);
  CHECK(counts.decryptions == 2);
}
