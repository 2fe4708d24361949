#include "skyline/storage.hpp"

#include <fstream>

#include "skyline/wire.hpp"

namespace sky {

namespace {

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DomainError("write failed: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open: " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_hex_sibling(const std::string& path, const std::string& text) {
  std::ofstream f(path + ".hex");
  f << text;
}

}  // namespace

void save_public_key(const std::string& path, const PublicKey& pk) {
  ByteWriter w;
  w.u32(pk.key_bits);
  w.bigint(pk.n);
  auto bytes = w.take();
  write_file(path, bytes);
  write_hex_sibling(path, "K " + std::to_string(pk.key_bits) + "\nN " + pk.n.hex() + "\n");
}

PublicKey load_public_key(const std::string& path) {
  auto bytes = read_file(path);
  ByteReader r(bytes);
  uint32_t bits = r.u32();
  Bigint n = r.bigint();
  r.expect_done();
  return PublicKey::from_modulus(bits, n);
}

void save_private_key(const std::string& path, const PrivateKey& sk) {
  ByteWriter w;
  w.u32(sk.key_bits);
  w.bigint(sk.p);
  w.bigint(sk.q);
  auto bytes = w.take();
  write_file(path, bytes);
  write_hex_sibling(path, "K " + std::to_string(sk.key_bits) + "\np " + sk.p.hex() + "\nq " +
                              sk.q.hex() + "\n");
}

PrivateKey load_private_key(const std::string& path) {
  auto bytes = read_file(path);
  ByteReader r(bytes);
  uint32_t bits = r.u32();
  Bigint p = r.bigint();
  Bigint q = r.bigint();
  r.expect_done();
  return PrivateKey::from_primes(bits, p, q);
}

void save_encrypted_dataset(const std::string& path, const EncryptedFileHeader& header,
                            const std::vector<EncryptedTuple>& rows) {
  ByteWriter w;
  w.u8('S');
  w.u8('K');
  w.u8('Y');
  w.u8('1');
  w.u32(header.key_bits);
  w.u32(header.n);
  w.u32(header.m);
  w.u32(header.d);
  w.u32(header.l);
  for (const EncryptedTuple& row : rows)
    for (const Ciphertext& c : row.attrs) w.bigint(c.value);
  auto bytes = w.take();
  write_file(path, bytes);
}

std::pair<EncryptedFileHeader, std::vector<EncryptedTuple>> load_encrypted_dataset(
    const std::string& path, const PublicKey& pk) {
  auto bytes = read_file(path);
  ByteReader r(bytes);
  if (r.u8() != 'S' || r.u8() != 'K' || r.u8() != 'Y' || r.u8() != '1')
    throw ProtocolError("bad dataset magic in " + path);
  EncryptedFileHeader h;
  h.key_bits = r.u32();
  h.n = r.u32();
  h.m = r.u32();
  h.d = r.u32();
  h.l = r.u32();
  if (h.key_bits != pk.key_bits) throw ProtocolError("dataset encrypted under a different key size");
  std::vector<EncryptedTuple> rows;
  rows.reserve(h.n);
  for (uint32_t i = 0; i < h.n; ++i) {
    EncryptedTuple t;
    t.width = h.d;
    t.attrs.reserve(h.m);
    for (uint32_t j = 0; j < h.m; ++j) {
      Ciphertext c{r.bigint(), pk.key_id};
      if (c.value <= Bigint(0) || c.value >= pk.n2)
        throw ProtocolError("ciphertext out of range in " + path);
      t.attrs.push_back(std::move(c));
    }
    rows.push_back(std::move(t));
  }
  r.expect_done();
  return {h, std::move(rows)};
}

std::vector<EncryptedTuple> encrypt_rows(const PublicKey& pk, const std::vector<PlainTuple>& rows,
                                         unsigned width, Rng& rng) {
  std::vector<EncryptedTuple> out;
  out.reserve(rows.size());
  for (const PlainTuple& row : rows) {
    EncryptedTuple t;
    t.width = width;
    t.attrs.reserve(row.size());
    for (uint64_t v : row) t.attrs.push_back(encrypt(pk, Bigint(v), rng));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace sky
