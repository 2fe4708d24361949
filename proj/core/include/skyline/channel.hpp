#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "skyline/wire.hpp"

namespace sky {

struct TimeoutError : ProtocolError {
  using ProtocolError::ProtocolError;
};

/// Bidirectional, blocking frame channel. One execution unit at a time.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& f) = 0;
  /// Blocks until a frame arrives; throws TimeoutError after `timeout`.
  virtual Frame recv(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

constexpr std::chrono::milliseconds kDefaultRpcTimeout{30'000};

/// Synchronous in-process channel: send() runs the handler immediately,
/// recv() returns its response. Zero threads, used by tests and the
/// in-process harness.
class DirectChannel final : public Channel {
 public:
  using Handler = std::function<Frame(const Frame&)>;
  explicit DirectChannel(Handler h) : handler_(std::move(h)) {}
  void send(const Frame& f) override { pending_.push_back(handler_(f)); }
  Frame recv(std::chrono::milliseconds) override;
  void close() override {}

 private:
  Handler handler_;
  std::deque<Frame> pending_;
};

/// Thread-safe queue pair; make_pair() yields the two endpoints.
class LoopbackChannel final : public Channel {
 public:
  static std::pair<std::shared_ptr<LoopbackChannel>, std::shared_ptr<LoopbackChannel>> make_pair();

  void send(const Frame& f) override;
  Frame recv(std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  struct Queue {
    std::mutex mx;
    std::condition_variable cv;
    std::deque<Frame> q;
    bool closed = false;
  };
  std::shared_ptr<Queue> in_, out_;
};

/// Frame channel over a connected TCP socket. Enables keepalive.
class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  static std::unique_ptr<TcpChannel> connect(const std::string& host, uint16_t port);

  void send(const Frame& f) override;
  Frame recv(std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  int fd_;
  FrameParser parser_;
  std::mutex send_mx_;
};

class TcpListener {
 public:
  explicit TcpListener(uint16_t port);  // port 0 picks a free port
  ~TcpListener();
  uint16_t port() const { return port_; }
  std::unique_ptr<TcpChannel> accept();
  void close();

 private:
  int fd_;
  uint16_t port_;
};

/// Issues one request and waits for its paired response on the same
/// session. Frames for foreign sessions are discarded. An ERROR response
/// raises IntegrityError or ProtocolError depending on its code.
Frame rpc(Channel& chan, const Frame& request,
          std::chrono::milliseconds timeout = kDefaultRpcTimeout);

/// Routes responses arriving on one shared channel to per-session inboxes,
/// so many concurrent sessions can share a single connection.
class SessionMux {
 public:
  explicit SessionMux(std::shared_ptr<Channel> base);
  ~SessionMux();

  /// A Channel view bound to one session; sends lock the shared channel.
  std::shared_ptr<Channel> open(const SessionId& session);
  void shutdown();

 private:
  class View;
  struct Inbox {
    std::mutex mx;
    std::condition_variable cv;
    std::deque<Frame> q;
    bool dead = false;
  };
  std::shared_ptr<Channel> base_;
  std::mutex send_mx_;
  std::mutex map_mx_;
  std::map<SessionId, std::shared_ptr<Inbox>> inboxes_;
  std::thread reader_;
  bool stopping_ = false;
};

/// Decorator that accumulates wall time spent inside send()/recv();
/// the harness reports it as communication time.
class TimingChannel final : public Channel {
 public:
  explicit TimingChannel(std::shared_ptr<Channel> inner) : inner_(std::move(inner)) {}
  void send(const Frame& f) override;
  Frame recv(std::chrono::milliseconds timeout) override;
  void close() override { inner_->close(); }
  std::chrono::nanoseconds elapsed() const { return std::chrono::nanoseconds(ns_); }

 private:
  std::shared_ptr<Channel> inner_;
  uint64_t ns_ = 0;
};

}  // namespace sky
