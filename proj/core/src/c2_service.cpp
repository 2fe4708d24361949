#include "skyline/c2_service.hpp"

#include <chrono>

namespace sky {

C2Service::C2Service(PublicKey pk, PrivateKey sk, Rng rng)
    : pk_(std::move(pk)), sk_(std::move(sk)), rng_(std::move(rng)) {}

Ciphertext C2Service::enc(const Bigint& m) { return encrypt_with_sk(sk_, m, rng_); }

Frame C2Service::handle(const Frame& req) {
  auto t0 = std::chrono::steady_clock::now();
  std::lock_guard lk(mx_);
  Frame out;
  try {
    out = dispatch(req);
  } catch (const IntegrityError& e) {
    if (log_) log_(std::string("error integrity ") + e.what());
    out = make_error_frame(req.session, 2, e.what());
  } catch (const std::exception& e) {
    if (log_) log_(std::string("error ") + e.what());
    out = make_error_frame(req.session, 1, e.what());
  }
  busy_ns_.fetch_add(static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                               std::chrono::steady_clock::now() - t0)
                                               .count()),
                     std::memory_order_relaxed);
  return out;
}

Frame C2Service::dispatch(const Frame& req) {
  auto reply = [&](MsgType t, ByteWriter& w) { return Frame{t, req.session, w.take()}; };
  auto observe = [&](const Bigint& v) {
    if (obs_) obs_->on_plain(req.type, v);
  };
  auto decrypt_one = [&](const Bigint& value) {
    Bigint v = decrypt(sk_, Ciphertext{value, sk_.key_id});
    observe(v);
    return v;
  };
  // Unmasked probe paths additionally check ciphertext well-formedness;
  // a tampered ciphertext surfaces here as an integrity error.
  auto decrypt_probe = [&](const Bigint& value) {
    Ciphertext c{value, sk_.key_id};
    if (!ciphertext_well_formed(pk_, c)) throw IntegrityError("ill-formed ciphertext in probe");
    Bigint v = decrypt(sk_, c);
    observe(v);
    return v;
  };

  ByteReader r(req.payload);
  switch (req.type) {
    case MsgType::SM_BLINDED_PAIR: {
      Bigint a = decrypt_one(r.bigint());
      Bigint b = decrypt_one(r.bigint());
      r.expect_done();
      ByteWriter w;
      w.bigint(enc(mulm(a, b, pk_.n)).value);
      if (log_) log_("sm n=2");
      return reply(MsgType::SM_PRODUCT, w);
    }
    case MsgType::SBD_MASKED: {
      Bigint y = decrypt_one(r.bigint());
      r.expect_done();
      ByteWriter w;
      w.bigint(enc(y.is_odd() ? 1 : 0).value);
      if (log_) log_("sbd bit");
      return reply(MsgType::SBD_PARITY, w);
    }
    case MsgType::FOS_BETA: {
      uint32_t count = r.u32();
      size_t zero_pos = 0, zeros = 0;
      for (uint32_t i = 0; i < count; ++i) {
        Bigint v = decrypt_probe(r.bigint());
        if (v.is_zero()) {
          ++zeros;
          zero_pos = i;
        }
      }
      r.expect_done();
      if (zeros != 1)
        throw IntegrityError("selection probe must contain exactly one zero, saw " +
                             std::to_string(zeros));
      if (obs_) obs_->on_selection_zero(zero_pos, count);
      ByteWriter w;
      w.u32(count);
      for (uint32_t i = 0; i < count; ++i) w.bigint(enc(i == zero_pos ? 1 : 0).value);
      if (log_) log_("selection probe n=" + std::to_string(count));
      return reply(MsgType::FOS_U, w);
    }
    case MsgType::TERM_LAMBDA: {
      Bigint v = decrypt_probe(r.bigint());
      r.expect_done();
      ByteWriter w;
      w.u8(v.is_zero() ? 1 : 0);
      if (log_) log_(std::string("termination check ") + (v.is_zero() ? "done" : "continue"));
      return reply(MsgType::TERM_VERDICT, w);
    }
    case MsgType::BSSP_MIN_PROBE: {
      uint32_t count = r.u32();
      bool found = false;
      uint32_t first_zero = 0;
      for (uint32_t i = 0; i < count; ++i) {
        Bigint v = decrypt_probe(r.bigint());
        if (!found && v.is_zero()) {
          found = true;
          first_zero = i;
        }
      }
      r.expect_done();
      if (!found) throw IntegrityError("minimum probe contained no zero");
      ByteWriter w;
      w.u32(first_zero);
      if (log_) log_("min probe n=" + std::to_string(count));
      return reply(MsgType::BSSP_MIN_INDEX, w);
    }
    case MsgType::BSSP_DOM_PROBE: {
      uint32_t count = r.u32();
      std::vector<uint8_t> flags(count);
      for (uint32_t i = 0; i < count; ++i) {
        Bigint v = decrypt_probe(r.bigint());
        if (v != Bigint(0) && v != Bigint(1))
          throw IntegrityError("dominance output is not a bit");
        flags[i] = v.is_zero() ? 0 : 1;
      }
      r.expect_done();
      ByteWriter w;
      w.u32(count);
      for (uint8_t f : flags) w.u8(f);
      if (log_) log_("dominance probe n=" + std::to_string(count));
      return reply(MsgType::BSSP_DOM_FLAGS, w);
    }
    case MsgType::RESULT_ALPHA: {
      Stored st;
      st.rows = r.u32();
      st.cols = r.u32();
      st.values.reserve(size_t{st.rows} * st.cols);
      for (uint32_t i = 0; i < st.rows * st.cols; ++i) st.values.push_back(decrypt_one(r.bigint()));
      r.expect_done();
      results_[req.session] = std::move(st);
      if (log_) log_("result stored rows=" + std::to_string(results_[req.session].rows));
      ByteWriter w;
      return reply(MsgType::RESULT_ACK, w);
    }
    case MsgType::RESULT_FETCH_RPRIME: {
      r.expect_done();
      auto it = results_.find(req.session);
      if (it == results_.end()) throw ProtocolError("no result stored for this session");
      ByteWriter w;
      w.u32(it->second.rows);
      w.u32(it->second.cols);
      for (const Bigint& v : it->second.values) w.bigint(v);
      if (log_) log_("result fetched");
      Frame f = reply(MsgType::RESULT_RPRIME, w);
      results_.erase(it);
      return f;
    }
    default:
      throw ProtocolError(std::string("unsupported request ") + msg_type_name(req.type));
  }
}

}  // namespace sky
