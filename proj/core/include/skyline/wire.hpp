#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skyline/bigint.hpp"

namespace sky {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A peer detected a violated protocol precondition (e.g. the selection
// probe did not contain exactly one zero, or an ill-formed ciphertext).
struct IntegrityError : ProtocolError {
  using ProtocolError::ProtocolError;
};

/// Request/response types. Every request pairs with exactly one response.
enum class MsgType : uint8_t {
  // two-party primitives (C1 -> C2)
  SM_BLINDED_PAIR = 0x01,
  SM_PRODUCT = 0x02,
  SBD_MASKED = 0x03,
  SBD_PARITY = 0x04,
  // skyline selection and termination (C1 -> C2)
  FOS_BETA = 0x05,
  FOS_U = 0x06,
  TERM_LAMBDA = 0x07,
  TERM_VERDICT = 0x08,
  // basic-protocol exchanges (C1 -> C2); these intentionally reveal
  // indexes, which is the documented leakage of that protocol
  BSSP_MIN_PROBE = 0x09,
  BSSP_MIN_INDEX = 0x0a,
  BSSP_DOM_PROBE = 0x0b,
  BSSP_DOM_FLAGS = 0x0c,
  // result return
  RESULT_ALPHA = 0x0d,       // C1 -> C2: noisy encrypted result
  RESULT_ACK = 0x0e,
  RESULT_FETCH_RPRIME = 0x0f,  // client -> C2
  RESULT_RPRIME = 0x10,
  RESULT_FETCH_NOISE = 0x11,   // client -> C1
  RESULT_NOISE = 0x12,
  // query orchestration (client -> C1)
  QUERY_SUBMIT = 0x13,
  QUERY_DONE = 0x14,
  // partition dispatch (manager -> worker)
  ASSIGN = 0x15,
  RESULT = 0x16,
  // error response, legal reply to any request
  ERROR = 0x7f,
};

bool msg_type_known(uint8_t t);
bool is_request(MsgType t);
/// The response type paired with a request; throws ProtocolError otherwise.
MsgType response_of(MsgType t);
const char* msg_type_name(MsgType t);

using SessionId = std::array<uint8_t, 16>;

SessionId random_session_id(Rng& rng);
std::string session_id_hex(const SessionId& id);

/// One protocol message. On the wire:
///   u32 length (big-endian, bytes after this field) | u8 type |
///   16-byte session id | payload
struct Frame {
  MsgType type{};
  SessionId session{};
  std::vector<uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

constexpr size_t kFrameMaxPayload = 64u * 1024 * 1024 - 17;  // 64 MiB frame cap

std::vector<uint8_t> encode_frame(const Frame& f);
/// Decodes one complete frame; throws ProtocolError on truncation, unknown
/// type, or length mismatch.
Frame decode_frame(std::span<const uint8_t> bytes);

Frame make_error_frame(const SessionId& session, uint16_t code, const std::string& message);
/// Raises the exception an ERROR frame encodes (IntegrityError for
/// code 2, ProtocolError otherwise).
[[noreturn]] void throw_error_frame(const Frame& f);

/// Incremental decoder for a byte stream. Feed arbitrary chunks, pop
/// complete frames; chunking never changes the decoded sequence.
class FrameParser {
 public:
  void feed(std::span<const uint8_t> bytes);
  std::optional<Frame> next();

 private:
  std::vector<uint8_t> buf_;
  size_t consumed_ = 0;
};

/// Big-endian payload writer.
class ByteWriter {
 public:
  void u8(uint8_t v);
  void u16(uint16_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  /// WireBigInt: u32 byte length then big-endian magnitude without
  /// leading zeros; the value 0 encodes as length 0.
  void bigint(const Bigint& v);
  void bytes(std::span<const uint8_t> b);
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}
  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  Bigint bigint();
  bool done() const { return pos_ == data_.size(); }
  /// Throws unless the whole payload was consumed.
  void expect_done() const;

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  void need(size_t n) const;
};

}  // namespace sky
