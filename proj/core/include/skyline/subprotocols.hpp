#pragma once

#include <memory>
#include <span>

#include "skyline/channel.hpp"
#include "skyline/paillier.hpp"

namespace sky {

/// Ciphertext whose plaintext is 0 or 1.
struct EncryptedBit {
  Ciphertext cipher;
};

/// Encrypted bits of a value, most significant first.
struct EncryptedBitVector {
  std::vector<EncryptedBit> bits;
  unsigned width = 0;  // == bits.size()
};

/// Subprotocol invocation tallies for one session.
struct ProtocolCounters {
  uint64_t rpcs = 0;
  uint64_t sm = 0;
  uint64_t sbd = 0;
  uint64_t sbd_bits = 0;
  uint64_t snot = 0;
  uint64_t sor = 0;
  uint64_t sand = 0;
  uint64_t sleq = 0;
  uint64_t seq = 0;
  uint64_t sless = 0;
  uint64_t smin2 = 0;
  uint64_t sdom = 0;
};

/// C1's handle on one conversation with the key-holder C2. Strictly one
/// request in flight; open one context per concurrent protocol instance.
class TwoPartyContext {
 public:
  TwoPartyContext(PublicKey pk, ProtocolParams params, std::shared_ptr<Channel> chan, Rng rng);

  const PublicKey& pk() const { return pk_; }
  const ProtocolParams& params() const { return params_; }
  ProtocolParams& params() { return params_; }
  const SessionId& session() const { return session_; }
  Rng& rng() { return rng_; }
  ProtocolCounters& counters() { return counters_; }
  Channel& channel() { return *chan_; }

  /// One request/response exchange on this session.
  Frame call(MsgType type, std::vector<uint8_t> payload);

  /// E(1) with unit randomness, cached; used by local complement.
  const Ciphertext& enc_one() const { return one_; }

 private:
  PublicKey pk_;
  ProtocolParams params_;
  std::shared_ptr<Channel> chan_;
  Rng rng_;
  SessionId session_;
  ProtocolCounters counters_;
  Ciphertext one_;
};

/// Secure multiplication: decrypts to a*b mod N. C2 sees only the
/// additively masked operands.
Ciphertext sm(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb);

/// Secure bit decomposition of a < 2^width into encrypted bits, MSB first.
/// Requires 2^(width + kappa + 1) < N so masked values never wrap.
EncryptedBitVector sbd(TwoPartyContext& ctx, const Ciphertext& ea, unsigned width);

/// Local inverse of sbd: sum of bit_g * 2^(width-g).
Ciphertext recompose(const PublicKey& pk, const EncryptedBitVector& v);

/// Local complement 1 - a of an encrypted bit.
EncryptedBit snot(TwoPartyContext& ctx, const EncryptedBit& a);

EncryptedBit sor(TwoPartyContext& ctx, const EncryptedBit& a, const EncryptedBit& b);
EncryptedBit sand(TwoPartyContext& ctx, const EncryptedBit& a, const EncryptedBit& b);

/// Bool(a <= b) for a, b < 2^width, from the top bit of 2^width + b - a.
EncryptedBit sleq(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb,
                  unsigned width);

EncryptedBit seq(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb, unsigned width);

enum class SlessPath {
  Fast,       // not(b <= a)
  Canonical,  // (a <= b) and not(a == b)
};

EncryptedBit sless(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb,
                   unsigned width, SlessPath path = SlessPath::Fast);

/// Fresh ciphertext of min(a, b).
Ciphertext smin2(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb, unsigned width);

enum class MinFold { Linear, Hierarchical };

/// Minimum of a non-empty list of encrypted values below 2^width.
Ciphertext smin_n(TwoPartyContext& ctx, std::span<const Ciphertext> values, unsigned width,
                  MinFold fold = MinFold::Linear);

}  // namespace sky
