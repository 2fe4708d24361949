#pragma once

#include <string>

#include "skyline/dominance.hpp"
#include "skyline/oracle.hpp"
#include "skyline/paillier.hpp"

namespace sky {

// Key files: {K, N} for the public half, {K, p, q} for the private half,
// in the wire big-integer layout. A `.hex` sibling carries the same
// fields as text for debugging.

void save_public_key(const std::string& path, const PublicKey& pk);
PublicKey load_public_key(const std::string& path);
void save_private_key(const std::string& path, const PrivateKey& sk);
PrivateKey load_private_key(const std::string& path);

/// Encrypted dataset file: magic "SKY1", header {K, n, m, d, l}, then
/// row-major attribute ciphertexts in the wire big-integer layout.
struct EncryptedFileHeader {
  uint32_t key_bits = 0;
  uint32_t n = 0, m = 0, d = 0, l = 0;
};

void save_encrypted_dataset(const std::string& path, const EncryptedFileHeader& header,
                            const std::vector<EncryptedTuple>& rows);
std::pair<EncryptedFileHeader, std::vector<EncryptedTuple>> load_encrypted_dataset(
    const std::string& path, const PublicKey& pk);

/// Owner-side helper: attribute-wise encryption of a plaintext table.
std::vector<EncryptedTuple> encrypt_rows(const PublicKey& pk, const std::vector<PlainTuple>& rows,
                                         unsigned width, Rng& rng);

}  // namespace sky
