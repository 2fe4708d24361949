#pragma once

#include <functional>
#include <map>
#include <mutex>

#include "skyline/paillier.hpp"
#include "skyline/wire.hpp"

namespace sky {

/// Test hook observing what the key-holder actually sees in plaintext.
class C2Observer {
 public:
  virtual ~C2Observer() = default;
  virtual void on_plain(MsgType, const Bigint&) {}
  /// Position of the zero inside a selection probe (permuted order).
  virtual void on_selection_zero(size_t position, size_t count) {
    (void)position;
    (void)count;
  }
};

/// The key-holder role: answers blinded decryption requests. Every
/// response ciphertext is a fresh probabilistic encryption. Stateless
/// apart from decrypted result matrices awaiting client pick-up.
class C2Service {
 public:
  C2Service(PublicKey pk, PrivateKey sk, Rng rng);

  /// Handles one request frame; never throws, errors become ERROR frames.
  /// Safe to call from several connection threads.
  Frame handle(const Frame& req);

  void set_observer(C2Observer* obs) { obs_ = obs; }
  void set_logger(std::function<void(const std::string&)> log) { log_ = std::move(log); }

  /// Accumulated wall time spent answering requests.
  double busy_seconds() const { return static_cast<double>(busy_ns_.load()) * 1e-9; }

 private:
  Frame dispatch(const Frame& req);
  Ciphertext enc(const Bigint& m);

  PublicKey pk_;
  PrivateKey sk_;
  Rng rng_;
  std::mutex mx_;
  std::atomic<uint64_t> busy_ns_{0};
  C2Observer* obs_ = nullptr;
  std::function<void(const std::string&)> log_;
  struct Stored {
    uint32_t rows = 0, cols = 0;
    std::vector<Bigint> values;
  };
  std::map<SessionId, Stored> results_;
};

}  // namespace sky
