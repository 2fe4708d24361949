#include "skyline/wire.hpp"

#include <cstring>

namespace sky {

namespace {

struct Pair {
  MsgType req, resp;
};

constexpr Pair kCatalog[] = {
    {MsgType::SM_BLINDED_PAIR, MsgType::SM_PRODUCT},
    {MsgType::SBD_MASKED, MsgType::SBD_PARITY},
    {MsgType::FOS_BETA, MsgType::FOS_U},
    {MsgType::TERM_LAMBDA, MsgType::TERM_VERDICT},
    {MsgType::BSSP_MIN_PROBE, MsgType::BSSP_MIN_INDEX},
    {MsgType::BSSP_DOM_PROBE, MsgType::BSSP_DOM_FLAGS},
    {MsgType::RESULT_ALPHA, MsgType::RESULT_ACK},
    {MsgType::RESULT_FETCH_RPRIME, MsgType::RESULT_RPRIME},
    {MsgType::RESULT_FETCH_NOISE, MsgType::RESULT_NOISE},
    {MsgType::QUERY_SUBMIT, MsgType::QUERY_DONE},
    {MsgType::ASSIGN, MsgType::RESULT},
};

}  // namespace

bool msg_type_known(uint8_t t) {
  for (const auto& p : kCatalog)
    if (t == static_cast<uint8_t>(p.req) || t == static_cast<uint8_t>(p.resp)) return true;
  return t == static_cast<uint8_t>(MsgType::ERROR);
}

bool is_request(MsgType t) {
  for (const auto& p : kCatalog)
    if (t == p.req) return true;
  return false;
}

MsgType response_of(MsgType t) {
  for (const auto& p : kCatalog)
    if (t == p.req) return p.resp;
  throw ProtocolError("message type is not a request");
}

const char* msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::SM_BLINDED_PAIR: return "SM_BLINDED_PAIR";
    case MsgType::SM_PRODUCT: return "SM_PRODUCT";
    case MsgType::SBD_MASKED: return "SBD_MASKED";
    case MsgType::SBD_PARITY: return "SBD_PARITY";
    case MsgType::FOS_BETA: return "FOS_BETA";
    case MsgType::FOS_U: return "FOS_U";
    case MsgType::TERM_LAMBDA: return "TERM_LAMBDA";
    case MsgType::TERM_VERDICT: return "TERM_VERDICT";
    case MsgType::BSSP_MIN_PROBE: return "BSSP_MIN_PROBE";
    case MsgType::BSSP_MIN_INDEX: return "BSSP_MIN_INDEX";
    case MsgType::BSSP_DOM_PROBE: return "BSSP_DOM_PROBE";
    case MsgType::BSSP_DOM_FLAGS: return "BSSP_DOM_FLAGS";
    case MsgType::RESULT_ALPHA: return "RESULT_ALPHA";
    case MsgType::RESULT_ACK: return "RESULT_ACK";
    case MsgType::RESULT_FETCH_RPRIME: return "RESULT_FETCH_RPRIME";
    case MsgType::RESULT_RPRIME: return "RESULT_RPRIME";
    case MsgType::RESULT_FETCH_NOISE: return "RESULT_FETCH_NOISE";
    case MsgType::RESULT_NOISE: return "RESULT_NOISE";
    case MsgType::QUERY_SUBMIT: return "QUERY_SUBMIT";
    case MsgType::QUERY_DONE: return "QUERY_DONE";
    case MsgType::ASSIGN: return "ASSIGN";
    case MsgType::RESULT: return "RESULT";
    case MsgType::ERROR: return "ERROR";
  }
  return "UNKNOWN";
}

SessionId random_session_id(Rng& rng) {
  SessionId id;
  for (size_t i = 0; i < id.size(); i += 8) {
    uint64_t w = rng.u64();
    for (size_t j = 0; j < 8; ++j) id[i + j] = static_cast<uint8_t>(w >> (8 * j));
  }
  return id;
}

std::string session_id_hex(const SessionId& id) {
  static const char* hexd = "0123456789abcdef";
  std::string s;
  s.reserve(32);
  for (uint8_t b : id) {
    s.push_back(hexd[b >> 4]);
    s.push_back(hexd[b & 0xf]);
  }
  return s;
}

std::vector<uint8_t> encode_frame(const Frame& f) {
  if (f.payload.size() > kFrameMaxPayload) throw ProtocolError("frame payload exceeds 64 MiB cap");
  uint32_t len = static_cast<uint32_t>(1 + 16 + f.payload.size());
  std::vector<uint8_t> out;
  out.reserve(4 + len);
  out.push_back(static_cast<uint8_t>(len >> 24));
  out.push_back(static_cast<uint8_t>(len >> 16));
  out.push_back(static_cast<uint8_t>(len >> 8));
  out.push_back(static_cast<uint8_t>(len));
  out.push_back(static_cast<uint8_t>(f.type));
  out.insert(out.end(), f.session.begin(), f.session.end());
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

Frame decode_frame(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) throw ProtocolError("truncated frame: missing length");
  uint32_t len = (uint32_t{bytes[0]} << 24) | (uint32_t{bytes[1]} << 16) |
                 (uint32_t{bytes[2]} << 8) | uint32_t{bytes[3]};
  if (len < 17) throw ProtocolError("frame length below header size");
  if (len > kFrameMaxPayload + 17) throw ProtocolError("frame exceeds 64 MiB cap");
  if (bytes.size() != 4 + static_cast<size_t>(len)) throw ProtocolError("frame length mismatch");
  if (!msg_type_known(bytes[4])) throw ProtocolError("unknown message type");
  Frame f;
  f.type = static_cast<MsgType>(bytes[4]);
  std::memcpy(f.session.data(), bytes.data() + 5, 16);
  f.payload.assign(bytes.begin() + 21, bytes.end());
  return f;
}

Frame make_error_frame(const SessionId& session, uint16_t code, const std::string& message) {
  ByteWriter w;
  w.u16(code);
  w.bytes({reinterpret_cast<const uint8_t*>(message.data()), message.size()});
  return Frame{MsgType::ERROR, session, w.take()};
}

void throw_error_frame(const Frame& f) {
  ByteReader r(f.payload);
  uint16_t code = r.u16();
  std::string msg;
  while (!r.done()) msg.push_back(static_cast<char>(r.u8()));
  if (code == 2) throw IntegrityError("peer reported integrity violation: " + msg);
  throw ProtocolError("peer reported error " + std::to_string(code) + ": " + msg);
}

void FrameParser::feed(std::span<const uint8_t> bytes) {
  if (consumed_ > 0 && consumed_ == buf_.size()) {
    buf_.clear();
    consumed_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameParser::next() {
  size_t avail = buf_.size() - consumed_;
  if (avail < 4) return std::nullopt;
  const uint8_t* p = buf_.data() + consumed_;
  uint32_t len = (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) |
                 uint32_t{p[3]};
  if (len < 17 || len > kFrameMaxPayload + 17) throw ProtocolError("bad frame length");
  if (avail < 4 + static_cast<size_t>(len)) return std::nullopt;
  Frame f = decode_frame({p, 4 + static_cast<size_t>(len)});
  consumed_ += 4 + static_cast<size_t>(len);
  if (consumed_ == buf_.size()) {
    buf_.clear();
    consumed_ = 0;
  }
  return f;
}

void ByteWriter::u8(uint8_t v) { out_.push_back(v); }

void ByteWriter::u16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
}

void ByteWriter::u32(uint32_t v) {
  u16(static_cast<uint16_t>(v >> 16));
  u16(static_cast<uint16_t>(v));
}

void ByteWriter::u64(uint64_t v) {
  u32(static_cast<uint32_t>(v >> 32));
  u32(static_cast<uint32_t>(v));
}

void ByteWriter::bigint(const Bigint& v) {
  auto mag = v.to_bytes();
  u32(static_cast<uint32_t>(mag.size()));
  out_.insert(out_.end(), mag.begin(), mag.end());
}

void ByteWriter::bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

void ByteReader::need(size_t n) const {
  if (pos_ + n > data_.size()) throw ProtocolError("truncated payload");
}

uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = (uint16_t{data_[pos_]} << 8) | data_[pos_ + 1];
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  uint32_t hi = u16();
  return (hi << 16) | u16();
}

uint64_t ByteReader::u64() {
  uint64_t hi = u32();
  return (hi << 32) | u32();
}

Bigint ByteReader::bigint() {
  uint32_t len = u32();
  need(len);
  if (len > 0 && data_[pos_] == 0) throw ProtocolError("non-minimal bigint encoding");
  Bigint v = Bigint::from_bytes(data_.subspan(pos_, len));
  pos_ += len;
  return v;
}

void ByteReader::expect_done() const {
  if (!done()) throw ProtocolError("trailing bytes in payload");
}

}  // namespace sky
