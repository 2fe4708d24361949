#include "skyline/skyline_protocol.hpp"

#include <algorithm>
#include <numeric>

namespace sky {

namespace {

std::vector<size_t> random_permutation(size_t n, Rng& rng) {
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace

uint64_t perturbation_value(uint64_t index, uint64_t n) { return n - 1 - index; }

EncryptedDataset preprocess(TwoPartyContext& ctx, std::vector<EncryptedTuple> enc_p,
                            const std::vector<Ciphertext>& neg_query) {
  const PublicKey& pk = ctx.pk();
  const size_t m = neg_query.size();
  EncryptedDataset ds;
  ds.mapped.reserve(enc_p.size());
  for (const EncryptedTuple& p : enc_p) {
    if (p.attrs.size() != m) throw DomainError("preprocess: dimension mismatch");
    EncryptedTuple t;
    t.width = 2 * ctx.params().d;
    t.attrs.reserve(m);
    for (size_t j = 0; j < m; ++j) {
      // (p[j] - q[j])^2: order-equivalent to the absolute distance and
      // computable with one secure multiplication
      Ciphertext diff = add(pk, p.attrs[j], neg_query[j]);
      t.attrs.push_back(sm(ctx, diff, diff));
    }
    ds.mapped.push_back(std::move(t));
  }
  ds.originals = std::move(enc_p);
  return ds;
}

FosResult find_one_skyline(TwoPartyContext& ctx, const EncryptedDataset& ds,
                           std::span<const Ciphertext> perturbed_sums, const Ciphertext& min_sum,
                           const FosRandomness* fixed) {
  const PublicKey& pk = ctx.pk();
  const size_t n = perturbed_sums.size();
  const size_t m = ds.originals.at(0).attrs.size();

  // alpha_i = sum_i - min, multiplicatively blinded: zero stays zero,
  // everything else turns uniformly random
  std::vector<Ciphertext> blinded(n);
  for (size_t i = 0; i < n; ++i) {
    Bigint r = fixed ? fixed->blinds.at(i) : ctx.rng().nonzero_below(pk.n);
    blinded[i] = scalar_mul(pk, sub(pk, perturbed_sums[i], min_sum), r);
  }
  std::vector<size_t> perm = fixed ? fixed->permutation : random_permutation(n, ctx.rng());

  ByteWriter w;
  w.u32(static_cast<uint32_t>(n));
  for (size_t i = 0; i < n; ++i) w.bigint(blinded[perm[i]].value);
  Frame resp = ctx.call(MsgType::FOS_BETA, w.take());

  ByteReader r(resp.payload);
  if (r.u32() != n) throw ProtocolError("selection response length mismatch");
  std::vector<EncryptedBit> selection(n);
  for (size_t i = 0; i < n; ++i) selection[perm[i]] = EncryptedBit{Ciphertext{r.bigint(), pk.key_id}};
  r.expect_done();

  // Oblivious extraction: attribute-wise inner product with the
  // selection vector; all non-selected terms contribute zero.
  FosResult out;
  out.entry.original.width = ds.originals[0].width;
  out.entry.mapped.width = ds.mapped[0].width;
  for (size_t j = 0; j < m; ++j) {
    Ciphertext acc_p = sm(ctx, selection[0].cipher, ds.originals[0].attrs[j]);
    Ciphertext acc_t = sm(ctx, selection[0].cipher, ds.mapped[0].attrs[j]);
    for (size_t i = 1; i < n; ++i) {
      acc_p = add(pk, acc_p, sm(ctx, selection[i].cipher, ds.originals[i].attrs[j]));
      acc_t = add(pk, acc_t, sm(ctx, selection[i].cipher, ds.mapped[i].attrs[j]));
    }
    out.entry.original.attrs.push_back(std::move(acc_p));
    out.entry.mapped.attrs.push_back(std::move(acc_t));
  }
  out.selection = std::move(selection);
  return out;
}

SkylinePool fssp(TwoPartyContext& ctx, const EncryptedDataset& ds, FsspTrace* trace) {
  const PublicKey& pk = ctx.pk();
  const ProtocolParams& params = ctx.params();
  const size_t n = ds.mapped.size();
  if (n == 0) return {};
  if (params.n != n) throw DomainError("fssp: params.n does not match the dataset");
  const unsigned l = params.l;
  const unsigned pert_bits = params.log2n();
  const unsigned full_width = l + pert_bits;
  const Bigint max_value = pow2(full_width) - Bigint(1);

  // Attribute sums, bit-decomposed to l bits.
  std::vector<EncryptedBitVector> sum_bits(n);
  for (size_t i = 0; i < n; ++i) {
    Ciphertext sum = attribute_sum(pk, ds.mapped[i]);
    if (trace) trace->raw_sums.push_back(sum);
    sum_bits[i] = sbd(ctx, sum, l);
  }

  // Order-preserving perturbation: a distinct low-order bit pattern per
  // tuple, so ties in the sums become strict without reordering.
  for (size_t i = 0; i < n; ++i) {
    uint64_t pert = perturbation_value(i, n);
    for (unsigned b = 0; b < pert_bits; ++b) {
      uint64_t bit = (pert >> (pert_bits - 1 - b)) & 1;
      sum_bits[i].bits.push_back(EncryptedBit{constant_ciphertext(pk, bit)});
    }
    sum_bits[i].width = full_width;
  }

  SkylinePool pool;
  for (;;) {
    std::vector<Ciphertext> perturbed(n);
    for (size_t i = 0; i < n; ++i) perturbed[i] = recompose(pk, sum_bits[i]);
    if (trace && pool.empty() && trace->perturbed_sums.empty())
      trace->perturbed_sums = perturbed;

    Ciphertext min_sum = smin_n(ctx, perturbed, full_width);

    // Termination probe: (min - MAX) * r decrypts to zero exactly when
    // every tuple has been flagged.
    Bigint r = ctx.rng().nonzero_below(pk.n);
    Ciphertext lambda =
        scalar_mul(pk, sub(pk, min_sum, constant_ciphertext(pk, max_value)), r);
    ByteWriter w;
    w.bigint(lambda.value);
    Frame verdict = ctx.call(MsgType::TERM_LAMBDA, w.take());
    ByteReader vr(verdict.payload);
    bool done = vr.u8() == 1;
    vr.expect_done();
    if (done) break;

    FosResult fos = find_one_skyline(ctx, ds, perturbed, min_sum);

    // Flag the selected tuple: OR its sum bits with the selection vector,
    // driving it to the all-ones MAX so it is never selected again.
    for (size_t i = 0; i < n; ++i)
      for (unsigned g = 0; g < full_width; ++g)
        sum_bits[i].bits[g] = sor(ctx, fos.selection[i], sum_bits[i].bits[g]);

    // Flag everything the selected tuple dominates, the same way.
    std::vector<EncryptedBit> dominated(n);
    for (size_t i = 0; i < n; ++i) dominated[i] = sdom(ctx, fos.entry.mapped, ds.mapped[i]);
    for (size_t i = 0; i < n; ++i)
      for (unsigned g = 0; g < full_width; ++g)
        sum_bits[i].bits[g] = sor(ctx, dominated[i], sum_bits[i].bits[g]);

    pool.push_back(fos.entry);
    if (trace) {
      FsspRoundTrace rt;
      rt.round_min = min_sum;
      rt.selected = fos.entry;
      for (size_t i = 0; i < n; ++i) rt.flagged_sums.push_back(recompose(pk, sum_bits[i]));
      rt.counters_after = ctx.counters();
      trace->rounds.push_back(std::move(rt));
    }
  }
  return pool;
}

SkylinePool bssp(TwoPartyContext& ctx, const EncryptedDataset& ds, BsspTrace* trace) {
  const PublicKey& pk = ctx.pk();
  const size_t n = ds.mapped.size();
  const unsigned l = ctx.params().l;
  std::vector<size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);

  SkylinePool pool;
  while (!remaining.empty()) {
    std::vector<Ciphertext> sums;
    sums.reserve(remaining.size());
    for (size_t i : remaining) sums.push_back(attribute_sum(pk, ds.mapped[i]));

    Ciphertext min_sum = smin_n(ctx, sums, l);

    // Multiplicatively blinded differences: the zero marks the minimum
    // and C2 openly reports its position (the documented leak).
    ByteWriter w;
    w.u32(static_cast<uint32_t>(remaining.size()));
    for (size_t i = 0; i < remaining.size(); ++i) {
      Bigint r = ctx.rng().nonzero_below(pk.n);
      w.bigint(scalar_mul(pk, sub(pk, sums[i], min_sum), r).value);
    }
    Frame resp = ctx.call(MsgType::BSSP_MIN_PROBE, w.take());
    ByteReader rr(resp.payload);
    uint32_t probe_idx = rr.u32();
    rr.expect_done();
    if (probe_idx >= remaining.size()) throw ProtocolError("minimum index out of range");
    size_t selected = remaining[probe_idx];
    pool.push_back({ds.originals[selected], ds.mapped[selected]});
    if (trace) trace->selection_order.push_back(selected);

    // Dominance scan against the survivors; C2 decrypts the outcomes and
    // names the dominated indexes (the second documented leak).
    std::vector<size_t> others;
    others.reserve(remaining.size() - 1);
    for (size_t i : remaining)
      if (i != selected) others.push_back(i);

    std::vector<size_t> next;
    std::vector<size_t> eliminated;
    if (!others.empty()) {
      ByteWriter dw;
      dw.u32(static_cast<uint32_t>(others.size()));
      for (size_t i : others)
        dw.bigint(sdom(ctx, ds.mapped[selected], ds.mapped[i]).cipher.value);
      Frame dresp = ctx.call(MsgType::BSSP_DOM_PROBE, dw.take());
      ByteReader dr(dresp.payload);
      uint32_t count = dr.u32();
      if (count != others.size()) throw ProtocolError("dominance response length mismatch");
      for (size_t idx = 0; idx < others.size(); ++idx) {
        if (dr.u8() == 1)
          eliminated.push_back(others[idx]);
        else
          next.push_back(others[idx]);
      }
      dr.expect_done();
    }
    if (trace) trace->eliminated.push_back(eliminated);
    remaining = std::move(next);
  }
  return pool;
}

ResultNoise send_result(TwoPartyContext& ctx, const SkylinePool& pool, const SessionId& token) {
  const PublicKey& pk = ctx.pk();
  ResultNoise noise;
  noise.rows = static_cast<uint32_t>(pool.size());
  noise.cols = pool.empty() ? 0 : static_cast<uint32_t>(pool[0].original.attrs.size());
  ByteWriter w;
  w.u32(noise.rows);
  w.u32(noise.cols);
  for (const PoolEntry& e : pool) {
    for (const Ciphertext& c : e.original.attrs) {
      Bigint r = ctx.rng().below(pk.n);
      w.bigint(add(pk, c, encrypt(pk, r, ctx.rng())).value);
      noise.values.push_back(std::move(r));
    }
  }
  Frame req{MsgType::RESULT_ALPHA, token, w.take()};
  Frame resp = rpc(ctx.channel(), req);
  if (!resp.payload.empty()) throw ProtocolError("unexpected result ack payload");
  return noise;
}

std::vector<PlainTuple> fetch_result(Channel& c2_channel, const SessionId& token,
                                     const PublicKey& pk, const ResultNoise& noise) {
  Frame resp = rpc(c2_channel, Frame{MsgType::RESULT_FETCH_RPRIME, token, {}});
  ByteReader r(resp.payload);
  uint32_t rows = r.u32();
  uint32_t cols = r.u32();
  if (rows != noise.rows || cols != noise.cols)
    throw ProtocolError("result shape does not match noise shape");
  std::vector<PlainTuple> out;
  out.reserve(rows);
  for (uint32_t i = 0; i < rows; ++i) {
    PlainTuple t(cols);
    for (uint32_t j = 0; j < cols; ++j) {
      Bigint noisy = r.bigint();
      Bigint clean = (noisy + pk.n - (noise.values[size_t{i} * cols + j] % pk.n)) % pk.n;
      t[j] = clean.to_u64();
    }
    out.push_back(std::move(t));
  }
  r.expect_done();
  return out;
}

}  // namespace sky
