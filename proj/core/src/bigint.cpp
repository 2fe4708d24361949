#include "skyline/bigint.hpp"

#include <random>

namespace sky {

Bigint Bigint::from_dec(const std::string& s) {
  Bigint r;
  if (mpz_set_str(r.z_, s.c_str(), 10) != 0) throw DomainError("bad decimal integer: " + s);
  return r;
}

Bigint Bigint::from_hex(const std::string& s) {
  Bigint r;
  if (mpz_set_str(r.z_, s.c_str(), 16) != 0) throw DomainError("bad hex integer: " + s);
  return r;
}

std::string Bigint::dec() const {
  char* c = mpz_get_str(nullptr, 10, z_);
  std::string s(c);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, reinterpret_cast<void (**)(void*, size_t)>(&freefn));
  freefn(c, s.size() + 1);
  return s;
}

std::string Bigint::hex() const {
  char* c = mpz_get_str(nullptr, 16, z_);
  std::string s(c);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, reinterpret_cast<void (**)(void*, size_t)>(&freefn));
  freefn(c, s.size() + 1);
  return s;
}

std::vector<uint8_t> Bigint::to_bytes() const {
  if (is_zero()) return {};
  size_t count = 0;
  std::vector<uint8_t> out((mpz_sizeinbase(z_, 2) + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 1, 0, z_);
  out.resize(count);
  return out;
}

Bigint Bigint::from_bytes(std::span<const uint8_t> bytes) {
  Bigint r;
  if (!bytes.empty()) mpz_import(r.z_, bytes.size(), 1, 1, 1, 0, bytes.data());
  return r;
}

uint64_t Bigint::to_u64() const {
  if (!fits_u64()) throw DomainError("bigint does not fit in 64 bits");
  uint64_t lo = mpz_get_ui(z_);
  if (sizeof(unsigned long) >= 8) return lo;
  Bigint hi;
  mpz_fdiv_q_2exp(hi.z_, z_, 32);
  return (static_cast<uint64_t>(mpz_get_ui(hi.z_)) << 32) | (lo & 0xffffffffu);
}

Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& mod) {
  Bigint r;
  mpz_powm(r.raw(), base.raw(), exp.raw(), mod.raw());
  return r;
}

Bigint mulm(const Bigint& a, const Bigint& b, const Bigint& mod) {
  Bigint r;
  mpz_mul(r.raw(), a.raw(), b.raw());
  mpz_mod(r.raw(), r.raw(), mod.raw());
  return r;
}

Bigint invm(const Bigint& a, const Bigint& mod) {
  Bigint r;
  if (mpz_invert(r.raw(), a.raw(), mod.raw()) == 0)
    throw DomainError("not invertible modulo given modulus");
  return r;
}

Bigint gcd(const Bigint& a, const Bigint& b) {
  Bigint r;
  mpz_gcd(r.raw(), a.raw(), b.raw());
  return r;
}

Bigint lcm(const Bigint& a, const Bigint& b) {
  Bigint r;
  mpz_lcm(r.raw(), a.raw(), b.raw());
  return r;
}

Bigint pow2(unsigned k) {
  Bigint r;
  mpz_setbit(r.raw(), k);
  return r;
}

unsigned ceil_log2(uint64_t v) {
  unsigned bits = 0;
  while ((uint64_t{1} << bits) < v) {
    ++bits;
    if (bits >= 63) break;
  }
  return bits;
}

Rng::Rng() {
  gmp_randinit_mt(st_);
  std::random_device rd;
  uint64_t seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  gmp_randseed_ui(st_, seed);
}

Rng::Rng(uint64_t seed) {
  gmp_randinit_mt(st_);
  gmp_randseed_ui(st_, seed);
}

Rng::Rng(Rng&& o) noexcept {
  gmp_randinit_set(st_, o.st_);
  o.live_ = false;
  live_ = true;
}

Rng& Rng::operator=(Rng&& o) noexcept {
  if (this != &o) {
    if (live_) gmp_randclear(st_);
    gmp_randinit_set(st_, o.st_);
    o.live_ = false;
    live_ = true;
  }
  return *this;
}

Rng::~Rng() {
  if (live_) gmp_randclear(st_);
}

Bigint Rng::bits(unsigned nbits) {
  Bigint r;
  if (nbits > 0) mpz_urandomb(r.raw(), st_, nbits);
  return r;
}

Bigint Rng::below(const Bigint& bound) {
  Bigint r;
  mpz_urandomm(r.raw(), st_, bound.raw());
  return r;
}

Bigint Rng::nonzero_below(const Bigint& bound) {
  for (;;) {
    Bigint r = below(bound);
    if (!r.is_zero()) return r;
  }
}

uint64_t Rng::u64() {
  Bigint r = bits(64);
  return r.to_u64();
}

Rng Rng::split() { return Rng(u64() ^ 0x9e3779b97f4a7c15ULL); }

}  // namespace sky
