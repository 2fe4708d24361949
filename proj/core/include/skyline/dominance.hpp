#pragma once

#include "skyline/subprotocols.hpp"

namespace sky {

/// One record's attribute ciphertexts; every plaintext is below 2^width.
struct EncryptedTuple {
  std::vector<Ciphertext> attrs;
  unsigned width = 0;
};

/// Encrypted Bool(a dominates b): a[j] <= b[j] on every attribute and the
/// attribute sums differ. Neither party learns the outcome.
EncryptedBit sdom(TwoPartyContext& ctx, const EncryptedTuple& a, const EncryptedTuple& b);

/// Homomorphic attribute sum of one tuple.
Ciphertext attribute_sum(const PublicKey& pk, const EncryptedTuple& t);

}  // namespace sky
