#include "skyline/subprotocols.hpp"

namespace sky {

TwoPartyContext::TwoPartyContext(PublicKey pk, ProtocolParams params,
                                 std::shared_ptr<Channel> chan, Rng rng)
    : pk_(std::move(pk)),
      params_(params),
      chan_(std::move(chan)),
      rng_(std::move(rng)),
      one_(constant_ciphertext(pk_, 1)) {
  params_.validate(pk_);
  session_ = random_session_id(rng_);
}

Frame TwoPartyContext::call(MsgType type, std::vector<uint8_t> payload) {
  ++counters_.rpcs;
  return rpc(*chan_, Frame{type, session_, std::move(payload)});
}

Ciphertext sm(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb) {
  ++ctx.counters().sm;
  const PublicKey& pk = ctx.pk();
  Bigint ra = ctx.rng().bits(ctx.params().blind_bits());
  Bigint rb = ctx.rng().bits(ctx.params().blind_bits());

  ByteWriter w;
  w.bigint(add_plain(pk, ea, ra).value);
  w.bigint(add_plain(pk, eb, rb).value);
  Frame resp = ctx.call(MsgType::SM_BLINDED_PAIR, w.take());
  ByteReader r(resp.payload);
  Ciphertext product{r.bigint(), pk.key_id};
  r.expect_done();

  // (a+ra)(b+rb) = ab + ra*b + rb*a + ra*rb; strip the cross terms
  Ciphertext cross = add(pk, scalar_mul(pk, eb, ra), scalar_mul(pk, ea, rb));
  cross = add_plain(pk, cross, ra * rb);
  return sub(pk, product, cross);
}

EncryptedBitVector sbd(TwoPartyContext& ctx, const Ciphertext& ea, unsigned width) {
  const PublicKey& pk = ctx.pk();
  if (width == 0) throw DomainError("sbd width must be positive");
  if (pow2(width + ctx.params().kappa + 1) >= pk.n)
    throw DomainError("sbd width violates the no-wraparound bound for this key");
  ++ctx.counters().sbd;
  ctx.counters().sbd_bits += width;

  // Blinded-parity loop, least significant bit outward. Each step C2 sees
  // only the masked residue; the mask keeps at least kappa random bits
  // above the remaining value, and the sum never wraps mod N.
  Ciphertext ex = ea;
  std::vector<EncryptedBit> lsb_first;
  lsb_first.reserve(width);
  for (unsigned i = 0; i < width; ++i) {
    unsigned remaining = width - i;
    Bigint mask = ctx.rng().bits(remaining + ctx.params().kappa);
    ByteWriter w;
    w.bigint(add_plain(pk, ex, mask).value);
    Frame resp = ctx.call(MsgType::SBD_MASKED, w.take());
    ByteReader r(resp.payload);
    EncryptedBit parity{Ciphertext{r.bigint(), pk.key_id}};
    r.expect_done();
    // parity of x + mask == x0 xor mask0 (no wraparound)
    EncryptedBit bit = mask.is_odd() ? snot(ctx, parity) : parity;
    if (i + 1 < width) ex = scalar_mul(pk, sub(pk, ex, bit.cipher), pk.half);
    lsb_first.push_back(std::move(bit));
  }
  EncryptedBitVector out;
  out.width = width;
  out.bits.assign(lsb_first.rbegin(), lsb_first.rend());
  return out;
}

Ciphertext recompose(const PublicKey& pk, const EncryptedBitVector& v) {
  Ciphertext acc = constant_ciphertext(pk, 0);
  for (unsigned g = 0; g < v.width; ++g)
    acc = add(pk, acc, scalar_mul(pk, v.bits[g].cipher, pow2(v.width - 1 - g)));
  return acc;
}

EncryptedBit snot(TwoPartyContext& ctx, const EncryptedBit& a) {
  ++ctx.counters().snot;
  return {sub(ctx.pk(), ctx.enc_one(), a.cipher)};
}

EncryptedBit sor(TwoPartyContext& ctx, const EncryptedBit& a, const EncryptedBit& b) {
  ++ctx.counters().sor;
  Ciphertext ab = sm(ctx, a.cipher, b.cipher);
  return {sub(ctx.pk(), add(ctx.pk(), a.cipher, b.cipher), ab)};
}

EncryptedBit sand(TwoPartyContext& ctx, const EncryptedBit& a, const EncryptedBit& b) {
  ++ctx.counters().sand;
  return {sm(ctx, a.cipher, b.cipher)};
}

EncryptedBit sleq(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb,
                  unsigned width) {
  ++ctx.counters().sleq;
  const PublicKey& pk = ctx.pk();
  // z = 2^width + b - a lies in (0, 2^(width+1)); its top bit is 1 iff a <= b
  Ciphertext ez = add_plain(pk, sub(pk, eb, ea), pow2(width));
  EncryptedBitVector zbits = sbd(ctx, ez, width + 1);
  return zbits.bits.front();
}

EncryptedBit seq(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb, unsigned width) {
  ++ctx.counters().seq;
  EncryptedBit le = sleq(ctx, ea, eb, width);
  EncryptedBit ge = sleq(ctx, eb, ea, width);
  return sand(ctx, le, ge);
}

EncryptedBit sless(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb, unsigned width,
                   SlessPath path) {
  ++ctx.counters().sless;
  if (path == SlessPath::Fast) return snot(ctx, sleq(ctx, eb, ea, width));
  EncryptedBit le = sleq(ctx, ea, eb, width);
  EncryptedBit eq = seq(ctx, ea, eb, width);
  return sand(ctx, le, snot(ctx, eq));
}

Ciphertext smin2(TwoPartyContext& ctx, const Ciphertext& ea, const Ciphertext& eb, unsigned width) {
  ++ctx.counters().smin2;
  EncryptedBit a_le_b = sleq(ctx, ea, eb, width);
  // a*out + b*(1-out); both products are freshly blinded, so the result
  // ciphertext differs from either input
  Ciphertext left = sm(ctx, a_le_b.cipher, ea);
  Ciphertext right = sm(ctx, snot(ctx, a_le_b).cipher, eb);
  return add(ctx.pk(), left, right);
}

Ciphertext smin_n(TwoPartyContext& ctx, std::span<const Ciphertext> values, unsigned width,
                  MinFold fold) {
  if (values.empty()) throw DomainError("smin_n of empty list");
  if (values.size() == 1) return values[0];
  if (fold == MinFold::Linear) {
    Ciphertext acc = values[0];
    for (size_t i = 1; i < values.size(); ++i) acc = smin2(ctx, acc, values[i], width);
    return acc;
  }
  std::vector<Ciphertext> layer(values.begin(), values.end());
  while (layer.size() > 1) {
    std::vector<Ciphertext> next;
    next.reserve((layer.size() + 1) / 2);
    for (size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(smin2(ctx, layer[i], layer[i + 1], width));
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer = std::move(next);
  }
  return layer[0];
}

}  // namespace sky
