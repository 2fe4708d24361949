#pragma once

#include <gmp.h>

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sky {

// Error raised when an argument falls outside an operation's domain
// (plaintext out of range, empty input list, bad parameter...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-negative arbitrary-precision integer backed by GMP.
class Bigint {
 public:
  Bigint() { mpz_init(z_); }
  Bigint(unsigned long v) { mpz_init_set_ui(z_, v); }  // NOLINT: implicit by design
  Bigint(unsigned v) { mpz_init_set_ui(z_, v); }       // NOLINT
  Bigint(int v) { mpz_init_set_si(z_, v); }            // NOLINT
  Bigint(const Bigint& o) { mpz_init_set(z_, o.z_); }
  Bigint(Bigint&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  Bigint& operator=(const Bigint& o) {
    if (this != &o) mpz_set(z_, o.z_);
    return *this;
  }
  Bigint& operator=(Bigint&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  ~Bigint() { mpz_clear(z_); }

  static Bigint from_dec(const std::string& s);
  static Bigint from_hex(const std::string& s);
  std::string dec() const;
  std::string hex() const;

  // Big-endian magnitude, no leading zero byte; empty for zero.
  std::vector<uint8_t> to_bytes() const;
  static Bigint from_bytes(std::span<const uint8_t> bytes);

  size_t bit_length() const { return mpz_sgn(z_) == 0 ? 0 : mpz_sizeinbase(z_, 2); }
  bool is_zero() const { return mpz_sgn(z_) == 0; }
  bool is_odd() const { return mpz_odd_p(z_) != 0; }
  bool bit(size_t i) const { return mpz_tstbit(z_, i) != 0; }

  bool fits_u64() const { return mpz_sizeinbase(z_, 2) <= 64 || is_zero(); }
  uint64_t to_u64() const;

  friend Bigint operator+(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_add(r.z_, a.z_, b.z_);
    return r;
  }
  friend Bigint operator-(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_sub(r.z_, a.z_, b.z_);
    return r;
  }
  friend Bigint operator*(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_mul(r.z_, a.z_, b.z_);
    return r;
  }
  friend Bigint operator/(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_fdiv_q(r.z_, a.z_, b.z_);
    return r;
  }
  friend Bigint operator%(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_mod(r.z_, a.z_, b.z_);
    return r;
  }
  Bigint& operator+=(const Bigint& o) {
    mpz_add(z_, z_, o.z_);
    return *this;
  }
  Bigint& operator-=(const Bigint& o) {
    mpz_sub(z_, z_, o.z_);
    return *this;
  }

  friend bool operator==(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) == 0; }
  friend bool operator!=(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) != 0; }
  friend bool operator<(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) < 0; }
  friend bool operator<=(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) <= 0; }
  friend bool operator>(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) > 0; }
  friend bool operator>=(const Bigint& a, const Bigint& b) { return mpz_cmp(a.z_, b.z_) >= 0; }

  mpz_srcptr raw() const { return z_; }
  mpz_ptr raw() { return z_; }

 private:
  mpz_t z_;
};

Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& mod);
Bigint mulm(const Bigint& a, const Bigint& b, const Bigint& mod);
// Modular inverse; throws DomainError if gcd(a, mod) != 1.
Bigint invm(const Bigint& a, const Bigint& mod);
Bigint gcd(const Bigint& a, const Bigint& b);
Bigint lcm(const Bigint& a, const Bigint& b);
/// 2^k
Bigint pow2(unsigned k);

unsigned ceil_log2(uint64_t v);

/// Seedable random stream. One instance per execution unit; use split()
/// to derive an independent stream for another thread or session.
class Rng {
 public:
  Rng();  // seeded from the OS entropy source
  explicit Rng(uint64_t seed);
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&& o) noexcept;
  Rng& operator=(Rng&& o) noexcept;
  ~Rng();

  /// Uniform in [0, 2^nbits)
  Bigint bits(unsigned nbits);
  /// Uniform in [0, bound)
  Bigint below(const Bigint& bound);
  /// Uniform in [1, bound)
  Bigint nonzero_below(const Bigint& bound);
  uint64_t u64();
  /// Independent child stream.
  Rng split();

  // UniformRandomBitGenerator, so std::shuffle can consume an Rng.
  using result_type = uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }
  result_type operator()() { return u64(); }

 private:
  gmp_randstate_t st_;
  bool live_ = true;
};

}  // namespace sky
