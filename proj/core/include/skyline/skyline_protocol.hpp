#pragma once

#include "skyline/dominance.hpp"
#include "skyline/oracle.hpp"

namespace sky {

/// The encrypted inputs of one protocol instance: the stored records P
/// and the query-mapped records T, index-aligned.
struct EncryptedDataset {
  std::vector<EncryptedTuple> originals;  // P
  std::vector<EncryptedTuple> mapped;     // T
};

/// One delivered skyline point: original-space and mapped-space
/// ciphertexts. The mapped half feeds dominance scans and merges.
struct PoolEntry {
  EncryptedTuple original;
  EncryptedTuple mapped;
};

/// Skyline pool in selection order; length equals the round count.
using SkylinePool = std::vector<PoolEntry>;

/// Maps the stored records around the client's query point: per
/// attribute, the encrypted squared difference (p[j] - q[j])^2, computed
/// from the client-supplied encryptions of -q[j]. Mapped width is 2d.
EncryptedDataset preprocess(TwoPartyContext& ctx, std::vector<EncryptedTuple> enc_p,
                            const std::vector<Ciphertext>& neg_query);

/// Test seam for the selection subprotocol: explicit multiplicative
/// blinds and permutation instead of fresh randomness.
struct FosRandomness {
  std::vector<Bigint> blinds;       // r_i in [1, N)
  std::vector<size_t> permutation;  // beta[i] = alpha'[perm[i]]
};

struct FosResult {
  PoolEntry entry;
  std::vector<EncryptedBit> selection;  // V: exactly one entry is E(1)
};

/// Obliviously extracts the tuple whose perturbed sum equals min_sum.
/// Requires exactly one such tuple; the key-holder verifies that and
/// reports an integrity error otherwise.
FosResult find_one_skyline(TwoPartyContext& ctx, const EncryptedDataset& ds,
                           std::span<const Ciphertext> perturbed_sums, const Ciphertext& min_sum,
                           const FosRandomness* fixed = nullptr);

struct FsspRoundTrace {
  Ciphertext round_min;                 // perturbed minimum driving the round
  PoolEntry selected;
  std::vector<Ciphertext> flagged_sums; // perturbed sums after both flag passes
  ProtocolCounters counters_after;      // session counters at round end
};

/// Decryptable snapshots of the protocol's internal state, for tests.
struct FsspTrace {
  std::vector<Ciphertext> raw_sums;        // width l
  std::vector<Ciphertext> perturbed_sums;  // width l + ceil(log2 n)
  std::vector<FsspRoundTrace> rounds;
};

/// Fully secure protocol: bit-decomposed perturbed sums, oblivious
/// selection, MAX flagging of processed tuples. The servers learn only
/// the round count.
SkylinePool fssp(TwoPartyContext& ctx, const EncryptedDataset& ds, FsspTrace* trace = nullptr);

struct BsspTrace {
  std::vector<size_t> selection_order;          // dataset indexes, as revealed
  std::vector<std::vector<size_t>> eliminated;  // per round, as revealed
};

/// Basic protocol: efficient but leaks the selection order and the
/// dominance pattern to the servers (both land in the trace).
SkylinePool bssp(TwoPartyContext& ctx, const EncryptedDataset& ds, BsspTrace* trace = nullptr);

/// Noise the driver keeps for the client after shipping the blinded pool
/// to the key-holder.
struct ResultNoise {
  uint32_t rows = 0, cols = 0;
  std::vector<Bigint> values;  // row-major noise terms
};

/// C1 side of result return: blinds each pool attribute with fresh noise,
/// ships the blinded ciphertexts to C2 under `token`, and returns the
/// noise for the client. Neither server sees a result value.
ResultNoise send_result(TwoPartyContext& ctx, const SkylinePool& pool, const SessionId& token);

/// Client side: fetches the decrypted blinded values from C2 and removes
/// the noise. Values are reduced mod N.
std::vector<PlainTuple> fetch_result(Channel& c2_channel, const SessionId& token,
                                     const PublicKey& pk, const ResultNoise& noise);

/// Perturbation value appended to tuple i of n: mutually distinct within
/// [0, n-1]; descending so the worked tie-break order is reproducible.
uint64_t perturbation_value(uint64_t index, uint64_t n);

}  // namespace sky
